/** Browser bootstrap: owns the state, routes DOM events to API calls, and
 * re-renders after every server response. All state transitions flow
 * through server responses — there are no optimistic updates.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  SessionState,
  applyClick,
  applyExecution,
  applyPreview,
  applyProfile,
  canExecute,
  editSegment,
  initialState,
  reconcileLog,
} from "./state.js";
import { renderApp } from "./render.js";

const api = new ApiClient("", (url, init) => window.fetch(url, init));

let state: SessionState = initialState();

function mount(): HTMLElement {
  const el = document.getElementById("app");
  if (!el) throw new Error("missing #app mount point");
  return el;
}

function draw(): void {
  mount().innerHTML = renderApp(state);
}

function fail(err: unknown): void {
  state = { ...state, error: err instanceof ApiError ? err.message : String(err) };
  draw();
}

async function refreshServerViews(): Promise<void> {
  if (!state.sessionId) return;
  const [prof, log] = await Promise.all([
    api.profile(state.sessionId),
    api.log(state.sessionId),
  ]);
  state = applyProfile(state, prof.profile, prof.total, prof.exposure);
  state = reconcileLog(state, log.events);
}

async function newSession(): Promise<void> {
  const created = await api.createSession();
  state = { ...initialState(), intent: state.intent, pattern: state.pattern };
  state = { ...state, sessionId: created.session_id };
  draw();
}

function currentSeed(): number | undefined {
  const text = state.seedText.trim();
  if (!text) return undefined;
  const value = Number(text);
  return Number.isFinite(value) ? value : undefined;
}

async function preview(freshSeed: boolean): Promise<void> {
  if (!state.sessionId) await newSession();
  if (!state.intent.trim()) {
    state = { ...state, error: "enter an intent first" };
    draw();
    return;
  }
  if (freshSeed) {
    state = { ...state, seedText: String(Math.floor(Math.random() * 2 ** 31)) };
  }
  const resp = await api.composeQuery(state.sessionId!, {
    intent: state.intent,
    pattern: state.pattern,
    seed: currentSeed(),
    preview: true,
  });
  state = applyPreview(state, resp.query);
  draw();
}

async function execute(): Promise<void> {
  if (!state.sessionId || !canExecute(state)) return;
  // Execution path: only the rendered segments travel. The intent index
  // stays client-local.
  const resp = await api.executeSegments(state.sessionId, state.preview!.segments);
  state = applyExecution(state, resp);
  await refreshServerViews();
  draw();
}

async function clickTarget(target: string, kind: "result" | "ad"): Promise<void> {
  if (!state.sessionId) return;
  const sourceText =
    kind === "result"
      ? state.results
          .filter((r) => r.id === target)
          .map((r) => `${r.title} ${r.snippet}`)[0] ?? ""
      : state.ads.filter((a) => a.id === target).map((a) => a.text)[0] ?? "";
  try {
    const resp = await api.click(state.sessionId, target, kind);
    state = applyClick(state, target, sourceText, resp.profile, resp.total);
  } catch (err) {
    if (err instanceof ApiError && err.status === 400) {
      state = { ...state, error: `${err.message} — the page may have changed; re-execute` };
      draw();
      return;
    }
    throw err;
  }
  await refreshServerViews();
  draw();
}

function onClick(event: Event): void {
  const el = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!el) return;
  const action = el.dataset.action;
  const run = (p: Promise<void>) => p.catch(fail);
  if (action === "new-session") run(newSession());
  else if (action === "preview") run(preview(false));
  else if (action === "regenerate") run(preview(true));
  else if (action === "execute") run(execute());
  else if (action === "click-result") run(clickTarget(el.dataset.id!, "result"));
  else if (action === "click-ad") run(clickTarget(el.dataset.id!, "ad"));
}

function onChange(event: Event): void {
  const el = event.target as HTMLInputElement;
  const action = el.dataset.action;
  if (action === "set-intent") {
    state = { ...state, intent: el.value, preview: null };
    draw();
  } else if (action === "set-pattern") {
    state = { ...state, pattern: el.value, preview: null };
    draw();
  } else if (action === "set-seed") {
    state = { ...state, seedText: el.value };
  } else if (action === "edit-segment") {
    try {
      state = editSegment(state, Number(el.dataset.index), el.value);
    } catch (err) {
      fail(err);
      return;
    }
    draw();
  }
}

export function start(): void {
  draw();
  mount().addEventListener("click", onClick);
  mount().addEventListener("change", onChange);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
