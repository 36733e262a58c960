import { describe, expect, it } from "vitest";

import type { LogEvent, QueryInfo, QueryResponse } from "../src/api.js";
import {
  applyClick,
  applyExecution,
  applyPreview,
  applyProfile,
  canExecute,
  clickProgress,
  editSegment,
  exposureGauge,
  initialState,
  isClicked,
  isIntentRelevant,
  reconcileLog,
  type SessionState,
} from "../src/state.js";

function click(target: string, timestamp: number): LogEvent {
  return { type: "click", session_id: "S1", target, target_kind: "result", timestamp };
}

function previewQuery(overrides: Partial<QueryInfo> = {}): QueryInfo {
  return {
    id: "S1-Q1",
    pattern: "NIT",
    segments: ["cnn.com", "buy a toyota 2014", "coffee beans"],
    intent_index: 1,
    ...overrides,
  };
}

function withPreview(state: SessionState = initialState()): SessionState {
  return applyPreview({ ...state, intent: "buy a toyota 2014" }, previewQuery());
}

describe("isIntentRelevant", () => {
  it("matches when every intent word appears", () => {
    expect(isIntentRelevant("buy a toyota 2014", "Toyota Corolla 2014 — buy today")).toBe(true);
  });

  it("ignores single-letter words like 'a'", () => {
    expect(isIntentRelevant("buy a toyota 2014", "buy toyota 2014")).toBe(true);
  });

  it("rejects text missing an intent word", () => {
    expect(isIntentRelevant("buy a toyota 2014", "coffee bean prices")).toBe(false);
  });

  it("is false for an empty intent", () => {
    expect(isIntentRelevant("", "anything")).toBe(false);
    expect(isIntentRelevant("a", "a")).toBe(false);
  });
});

describe("preview handling", () => {
  it("stores segments, intent index, and pattern", () => {
    const s = withPreview();
    expect(s.preview).not.toBeNull();
    expect(s.preview!.segments).toEqual(["cnn.com", "buy a toyota 2014", "coffee beans"]);
    expect(s.preview!.intentIndex).toBe(1);
    expect(s.preview!.pattern).toBe("NIT");
  });

  it("refuses a response without an intent index", () => {
    expect(() => applyPreview(initialState(), previewQuery({ intent_index: undefined }))).toThrow(
      /intent index/,
    );
  });

  it("copies the segment list instead of aliasing it", () => {
    const query = previewQuery();
    const s = applyPreview(initialState(), query);
    query.segments[0] = "mutated";
    expect(s.preview!.segments[0]).toBe("cnn.com");
  });
});

describe("canExecute", () => {
  it("needs both a non-blank intent and a preview", () => {
    const empty = initialState();
    expect(canExecute(empty)).toBe(false);
    expect(canExecute({ ...empty, intent: "buy a toyota 2014" })).toBe(false);
    expect(canExecute({ ...withPreview(), intent: "   " })).toBe(false);
    expect(canExecute(withPreview())).toBe(true);
  });
});

describe("editSegment", () => {
  it("replaces a decoy segment", () => {
    const s = editSegment(withPreview(), 2, "espresso machines");
    expect(s.preview!.segments[2]).toBe("espresso machines");
  });

  it("locks the intent slot", () => {
    expect(() => editSegment(withPreview(), 1, "anything")).toThrow(/locked/);
  });

  it("rejects blank replacements and bad indices", () => {
    expect(() => editSegment(withPreview(), 0, "   ")).toThrow(/non-empty/);
    expect(() => editSegment(withPreview(), 9, "x")).toThrow(/out of range/);
    expect(() => editSegment(initialState(), 0, "x")).toThrow(/no preview/);
  });

  it("does not mutate the input state", () => {
    const before = withPreview();
    editSegment(before, 0, "replaced");
    expect(before.preview!.segments[0]).toBe("cnn.com");
  });
});

describe("server-mirrored views", () => {
  const page: QueryResponse = {
    query: { segments: ["x"] },
    result_page: [
      { id: "D1", url: "u1", title: "t1", snippet: "s1", categories: ["cars"], score: 1.5 },
    ],
    ads: [{ id: "A1", text: "ad text", category: "cars" }],
  };

  it("applyExecution swaps in the served page and ad strip", () => {
    const s = applyExecution(initialState(), page);
    expect(s.results.map((r) => r.id)).toEqual(["D1"]);
    expect(s.ads.map((a) => a.id)).toEqual(["A1"]);
  });

  it("applyClick mirrors the server profile verbatim", () => {
    let s = { ...withPreview() };
    s = applyClick(s, "D1", "toyota 2014 buy listings", { cars: 2 }, 2);
    expect(s.profile).toEqual({ cars: 2 });
    expect(s.profileTotal).toBe(2);
    expect(s.clickRelevance.D1).toBe(true);
    s = applyClick(s, "D2", "coffee grinder review", { cars: 2, coffee: 1 }, 3);
    expect(s.clickRelevance.D2).toBe(false);
    expect(s.profileTotal).toBe(3);
  });

  it("applyProfile stores counts, total, and exposure", () => {
    const exposure = {
      total_ads: 12,
      specific_ads: 1,
      conceptual_breakdown: { cars: 4 },
      exposure: 1 / 12,
    };
    const s = applyProfile(initialState(), { cars: 4 }, 4, exposure);
    expect(s.profile).toEqual({ cars: 4 });
    expect(s.profileTotal).toBe(4);
    expect(exposureGauge(s)).toBeCloseTo(1 / 12, 12);
    expect(exposureGauge(initialState())).toBeNull();
  });

  it("reconcileLog keeps the full timeline and filters clicks", () => {
    const events: LogEvent[] = [
      { type: "query", session_id: "S1", timestamp: 1 },
      click("D1", 2),
      { type: "ad_impression", session_id: "S1", target: "A1", timestamp: 3 },
      click("A1", 4),
    ];
    const s = reconcileLog(initialState(), events);
    expect(s.timeline).toHaveLength(4);
    expect(s.serverClicks.map((e) => e.target)).toEqual(["D1", "A1"]);
    expect(isClicked(s, "D1")).toBe(true);
    expect(isClicked(s, "A1")).toBe(true);
    expect(isClicked(s, "D2")).toBe(false);
  });
});

describe("clickProgress", () => {
  it("counts only server-confirmed clicks", () => {
    const s = reconcileLog(initialState(), [click("D1", 1), click("D2", 2)]);
    const p = clickProgress(s);
    expect(p.done).toBe(2);
    expect(p.goal).toBe(2);
  });

  it("hints when every click so far matched the intent", () => {
    let s = withPreview();
    s = applyClick(s, "D1", "buy toyota 2014 deals", { cars: 1 }, 1);
    s = reconcileLog(s, [click("D1", 1)]);
    expect(clickProgress(s).hint).toMatch(/decoy/);
  });

  it("stays quiet once a decoy has been clicked", () => {
    let s = withPreview();
    s = applyClick(s, "D1", "buy toyota 2014 deals", { cars: 1 }, 1);
    s = applyClick(s, "D2", "coffee futures", { cars: 1, coffee: 1 }, 2);
    s = reconcileLog(s, [click("D1", 1), click("D2", 2)]);
    expect(clickProgress(s).hint).toBeNull();
  });

  it("shows no hint before any click", () => {
    expect(clickProgress(initialState()).hint).toBeNull();
  });
});
