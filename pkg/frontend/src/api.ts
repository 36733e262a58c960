/** Typed client for the distortsearch HTTP API.
 *
 * The fetch implementation is injected so tests can fake or record the
 * wire traffic. All methods reject with `ApiError` on non-2xx responses,
 * carrying the server's `detail` message.
 */

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface QueryInfo {
  segments: string[];
  id?: string;
  pattern?: string;
  intent_index?: number;
}

export interface ResultRow {
  id: string;
  url: string;
  title: string;
  snippet: string;
  categories: string[];
  score: number;
}

export interface AdRow {
  id: string;
  text: string;
  category: string;
}

export interface QueryResponse {
  query: QueryInfo;
  result_page: ResultRow[];
  ads: AdRow[];
}

export interface ExposureInfo {
  total_ads: number;
  specific_ads: number;
  conceptual_breakdown: Record<string, number>;
  exposure: number;
}

export interface ProfileResponse {
  profile: Record<string, number>;
  total: number;
  exposure: ExposureInfo | null;
}

export interface ClickResponse {
  profile: Record<string, number>;
  total: number;
}

export interface LogEvent {
  type: string;
  session_id: string;
  target?: string;
  target_kind?: string;
  categories?: string[];
  timestamp: number;
  [key: string]: unknown;
}

export interface ComposeRequest {
  intent: string;
  pattern: string;
  seed?: number;
  preview?: boolean;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const text = await resp.text();
    const data: unknown = text ? JSON.parse(text) : null;
    if (!resp.ok) {
      const detail = (data as { detail?: string } | null)?.detail ?? resp.statusText;
      throw new ApiError(resp.status, detail);
    }
    return data as T;
  }

  createSession(): Promise<{ session_id: string }> {
    return this.request("POST", "/sessions");
  }

  /** Compose form: the server assembles an obfuscated query from the
   * intent + pattern. With `preview` true nothing is executed. */
  composeQuery(sessionId: string, req: ComposeRequest): Promise<QueryResponse> {
    const body: Record<string, unknown> = { intent: req.intent, pattern: req.pattern };
    if (req.seed !== undefined) body.seed = req.seed;
    if (req.preview !== undefined) body.preview = req.preview;
    return this.request("POST", `/sessions/${sessionId}/query`, body);
  }

  /** Execution form: only the rendered segment list goes on the wire.
   * No intent, intent_index, or pattern field is ever attached here. */
  executeSegments(sessionId: string, segments: string[]): Promise<QueryResponse> {
    return this.request("POST", `/sessions/${sessionId}/query`, { segments });
  }

  click(sessionId: string, target: string, kind: "result" | "ad"): Promise<ClickResponse> {
    return this.request("POST", `/sessions/${sessionId}/click`, { target, kind });
  }

  profile(sessionId: string): Promise<ProfileResponse> {
    return this.request("GET", `/sessions/${sessionId}/profile`);
  }

  log(sessionId: string): Promise<{ events: LogEvent[] }> {
    return this.request("GET", `/sessions/${sessionId}/log`);
  }

  latestReport(): Promise<Record<string, unknown>> {
    return this.request("GET", "/report/latest");
  }
}
