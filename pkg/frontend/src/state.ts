/** Pure session-view state and transitions.
 *
 * Every displayed count is copied verbatim from a server response; nothing
 * here re-derives totals client-side. Clicked flags come only from the
 * server event log, reconciled after every interaction. The one piece of
 * client-local knowledge is which preview segment holds the intent — that
 * index is never sent back on the execution path.
 */

import type {
  AdRow,
  ExposureInfo,
  LogEvent,
  QueryInfo,
  QueryResponse,
  ResultRow,
} from "./api.js";

export interface PreviewState {
  segments: string[];
  intentIndex: number;
  pattern: string;
}

export interface SessionState {
  sessionId: string | null;
  intent: string;
  pattern: string;
  seedText: string;
  kClicks: number;
  preview: PreviewState | null;
  results: ResultRow[];
  ads: AdRow[];
  serverClicks: LogEvent[];
  clickRelevance: Record<string, boolean>;
  profile: Record<string, number>;
  profileTotal: number;
  exposure: ExposureInfo | null;
  timeline: LogEvent[];
  error: string | null;
}

export const DEFAULT_PATTERNS = [
  "I", "IT", "IP", "TP", "IL", "NI", "NIT", "NIP", "IPL", "ITP",
  "NITP", "ITPL", "NIPL", "NITL", "NITPL",
];

export function initialState(): SessionState {
  return {
    sessionId: null,
    intent: "",
    pattern: "NITP",
    seedText: "",
    kClicks: 2,
    preview: null,
    results: [],
    ads: [],
    serverClicks: [],
    clickRelevance: {},
    profile: {},
    profileTotal: 0,
    exposure: null,
    timeline: [],
    error: null,
  };
}

/** Word-level containment heuristic used only for UI hints (decoy
 * encouragement); single-letter intent words like "a" are ignored. */
export function isIntentRelevant(intent: string, text: string): boolean {
  const tokens = (intent.toLowerCase().match(/[a-z0-9]+/g) ?? []).filter(
    (t) => t.length >= 2,
  );
  if (tokens.length === 0) return false;
  const haystack = text.toLowerCase();
  return tokens.every((t) => haystack.includes(t));
}

export function canExecute(state: SessionState): boolean {
  return state.intent.trim().length > 0 && state.preview !== null;
}

export function applyPreview(state: SessionState, query: QueryInfo): SessionState {
  if (query.intent_index === undefined) {
    throw new Error("preview response carries no intent index");
  }
  return {
    ...state,
    preview: {
      segments: [...query.segments],
      intentIndex: query.intent_index,
      pattern: query.pattern ?? "",
    },
    error: null,
  };
}

/** Hand-edit one decoy segment before execution. The intent slot is locked. */
export function editSegment(state: SessionState, index: number, text: string): SessionState {
  if (state.preview === null) throw new Error("nothing to edit: no preview");
  if (index < 0 || index >= state.preview.segments.length) {
    throw new Error(`segment index ${index} out of range`);
  }
  if (index === state.preview.intentIndex) {
    throw new Error("the intent segment is locked");
  }
  if (!text.trim()) throw new Error("segment must be non-empty");
  const segments = [...state.preview.segments];
  segments[index] = text.trim();
  return { ...state, preview: { ...state.preview, segments } };
}

export function applyExecution(state: SessionState, resp: QueryResponse): SessionState {
  return {
    ...state,
    results: resp.result_page,
    ads: resp.ads,
    error: null,
  };
}

/** Record what the user just clicked, with its UI-side relevance verdict,
 * and mirror the server-reported profile. */
export function applyClick(
  state: SessionState,
  target: string,
  targetText: string,
  profile: Record<string, number>,
  total: number,
): SessionState {
  return {
    ...state,
    clickRelevance: {
      ...state.clickRelevance,
      [target]: isIntentRelevant(state.intent, targetText),
    },
    profile,
    profileTotal: total,
  };
}

/** Clicked flags and the click counter mirror the server log exactly. */
export function reconcileLog(state: SessionState, events: LogEvent[]): SessionState {
  return {
    ...state,
    timeline: events,
    serverClicks: events.filter((e) => e.type === "click"),
  };
}

export function applyProfile(
  state: SessionState,
  profile: Record<string, number>,
  total: number,
  exposure: ExposureInfo | null,
): SessionState {
  return { ...state, profile, profileTotal: total, exposure };
}

export function isClicked(state: SessionState, targetId: string): boolean {
  return state.serverClicks.some((e) => e.target === targetId);
}

export interface ClickProgress {
  done: number;
  goal: number;
  hint: string | null;
}

export function clickProgress(state: SessionState): ClickProgress {
  const done = state.serverClicks.length;
  const verdicts = state.serverClicks.map((e) =>
    e.target !== undefined ? (state.clickRelevance[e.target] ?? false) : false,
  );
  const allRelevantSoFar = done > 0 && verdicts.every(Boolean);
  return {
    done,
    goal: state.kClicks,
    hint: allRelevantSoFar
      ? "every click so far matches your intent — click a decoy result to stay covered"
      : null,
  };
}

/** Specific-intent fraction of all served ads, as reported by the server. */
export function exposureGauge(state: SessionState): number | null {
  return state.exposure === null ? null : state.exposure.exposure;
}
