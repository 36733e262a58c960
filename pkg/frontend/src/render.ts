/** HTML renderers: pure functions from state to markup strings.
 *
 * The intent segment's highlight is a CSS class attached here, client-side;
 * it exists only in the DOM, never in any request body.
 */

import type { LogEvent } from "./api.js";
import {
  SessionState,
  canExecute,
  clickProgress,
  exposureGauge,
  isClicked,
} from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderHeader(state: SessionState): string {
  const sid = state.sessionId
    ? `<span class="session-id">${escapeHtml(state.sessionId)}</span>`
    : `<span class="session-id none">no session</span>`;
  return `<header>
    <h1>distortsearch</h1>
    <div>${sid} <button data-action="new-session">new session</button></div>
  </header>`;
}

export function renderComposer(state: SessionState): string {
  const execDisabled = canExecute(state) ? "" : " disabled";
  return `<section class="composer">
    <label>intent
      <input data-action="set-intent" name="intent" value="${escapeHtml(state.intent)}"
             placeholder="what you actually want to search">
    </label>
    <label>pattern
      <input data-action="set-pattern" name="pattern" list="patterns"
             value="${escapeHtml(state.pattern)}">
    </label>
    <label>seed
      <input data-action="set-seed" name="seed" value="${escapeHtml(state.seedText)}"
             placeholder="blank = session rng">
    </label>
    <button data-action="preview">preview</button>
    <button data-action="regenerate">regenerate</button>
    <button data-action="execute"${execDisabled}>execute</button>
  </section>`;
}

export function renderPreview(state: SessionState): string {
  if (state.preview === null) {
    return `<section class="preview empty">no query composed yet</section>`;
  }
  const chips = state.preview.segments
    .map((seg, i) => {
      if (i === state.preview!.intentIndex) {
        return `<span class="segment intent" title="your intent (shown only to you)">${escapeHtml(seg)}</span>`;
      }
      return `<input class="segment decoy" data-action="edit-segment" data-index="${i}"
                     value="${escapeHtml(seg)}">`;
    })
    .join("\n");
  return `<section class="preview">
    <h2>obfuscated query <small>(${escapeHtml(state.preview.pattern)})</small></h2>
    ${chips}
  </section>`;
}

export function renderClickCounter(state: SessionState): string {
  const p = clickProgress(state);
  const hint = p.hint ? `<div class="hint">${escapeHtml(p.hint)}</div>` : "";
  return `<section class="clicks">
    <span class="counter">clicks: ${p.done} / ${p.goal}</span>${hint}
  </section>`;
}

export function renderResults(state: SessionState): string {
  if (state.results.length === 0) {
    return `<section class="results empty">no results</section>`;
  }
  const items = state.results
    .map((r) => {
      const clicked = isClicked(state, r.id) ? " clicked" : "";
      return `<li class="result${clicked}" data-action="click-result" data-id="${escapeHtml(r.id)}">
        <span class="title">${escapeHtml(r.title)}</span>
        <span class="url">${escapeHtml(r.url)}</span>
        <span class="snippet">${escapeHtml(r.snippet)}</span>
      </li>`;
    })
    .join("\n");
  return `<section class="results"><h2>results</h2><ol>${items}</ol></section>`;
}

export function renderAds(state: SessionState): string {
  if (state.ads.length === 0) return `<section class="ads empty"></section>`;
  const items = state.ads
    .map(
      (a) => `<li class="ad${isClicked(state, a.id) ? " clicked" : ""}"
                  data-action="click-ad" data-id="${escapeHtml(a.id)}">
        <span class="text">${escapeHtml(a.text)}</span>
        <span class="category">${escapeHtml(a.category)}</span>
      </li>`,
    )
    .join("\n");
  return `<section class="ads"><h2>sponsored</h2><ul>${items}</ul></section>`;
}

export function renderProfile(state: SessionState): string {
  const entries = Object.entries(state.profile).sort(([a], [b]) => (a < b ? -1 : 1));
  const max = entries.reduce((m, [, v]) => Math.max(m, v), 0);
  const bars = entries
    .map(([cat, count]) => {
      const width = max > 0 ? Math.round((count / max) * 100) : 0;
      return `<div class="bar-row">
        <span class="label">${escapeHtml(cat)}</span>
        <span class="bar" style="width:${width}%"></span>
        <span class="count">${count}</span>
      </div>`;
    })
    .join("\n");
  const gauge = exposureGauge(state);
  const gaugeHtml =
    gauge === null
      ? `<div class="gauge none">exposure: n/a</div>`
      : `<div class="gauge"><span class="gauge-fill" style="width:${Math.round(gauge * 100)}%"></span>
         exposure: ${(gauge * 100).toFixed(1)}% specific
         (${state.exposure!.specific_ads} of ${state.exposure!.total_ads} ads)</div>`;
  return `<section class="profile">
    <h2>pseudo-profile <small>(what a tracker sees)</small></h2>
    ${bars || '<div class="empty">nothing yet</div>'}
    <div class="total">total: ${state.profileTotal}</div>
    ${gaugeHtml}
  </section>`;
}

function describeEvent(e: LogEvent): string {
  const kind = e.target_kind ? ` ${e.target_kind}` : "";
  const target = e.target ? ` ${e.target}` : "";
  return `${e.timestamp}: ${e.type}${kind}${target}`;
}

export function renderTimeline(state: SessionState): string {
  if (state.timeline.length === 0) return `<section class="timeline empty"></section>`;
  const items = state.timeline
    .map((e) => `<li class="${escapeHtml(e.type)}">${escapeHtml(describeEvent(e))}</li>`)
    .join("\n");
  return `<section class="timeline"><h2>event log</h2><ul>${items}</ul></section>`;
}

export function renderError(state: SessionState): string {
  if (!state.error) return "";
  return `<div class="error" role="alert">${escapeHtml(state.error)}</div>`;
}

export function renderApp(state: SessionState): string {
  return [
    renderHeader(state),
    renderError(state),
    renderComposer(state),
    renderPreview(state),
    renderClickCounter(state),
    renderResults(state),
    renderAds(state),
    renderProfile(state),
    renderTimeline(state),
  ].join("\n");
}
