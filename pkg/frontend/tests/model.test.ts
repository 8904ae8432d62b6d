import { describe, expect, it } from "vitest";

import {
  SnapshotError,
  buildTiles,
  canSelect,
  terminalManifestText,
  timelineEntries,
  validateSnapshot,
} from "../src/model.js";
import { activeSnapshot, terminalSnapshot } from "./fixtures.js";

describe("validateSnapshot", () => {
  it("accepts an active snapshot", () => {
    const snapshot = validateSnapshot(activeSnapshot());
    expect(snapshot.status).toBe("active");
  });

  it("accepts a terminal snapshot", () => {
    const snapshot = validateSnapshot(terminalSnapshot());
    expect(snapshot.status).toBe("terminated");
  });

  it("rejects a snapshot without a window", () => {
    const bad = { ...activeSnapshot(), window: undefined };
    expect(() => validateSnapshot(bad)).toThrow(SnapshotError);
  });

  it("rejects unknown statuses and malformed history", () => {
    expect(() => validateSnapshot({ ...activeSnapshot(), status: "paused" })).toThrow(
      SnapshotError,
    );
    expect(() => validateSnapshot({ ...activeSnapshot(), history: [["a", 1]] })).toThrow(
      SnapshotError,
    );
    expect(() => validateSnapshot(null)).toThrow(SnapshotError);
  });
});

describe("buildTiles", () => {
  it("renders one tile per candidate with infeasible ones disabled", () => {
    const tiles = buildTiles(activeSnapshot());
    expect(tiles).toHaveLength(5);
    expect(tiles.filter((t) => !t.selectable)).toHaveLength(2);
  });

  it("marks exactly the current candidate", () => {
    const snapshot = activeSnapshot();
    const tiles = buildTiles(snapshot);
    const current = tiles.filter((t) => t.current);
    expect(current).toHaveLength(1);
    expect(current[0].code).toBe(snapshot.code);
  });

  it("carries the infeasibility reason as the tooltip", () => {
    const tile = buildTiles(activeSnapshot()).find((t) => t.code === "3");
    expect(tile?.tooltip).toContain("arity");
    expect(tile?.caption).toBe("infeasible");
  });
});

describe("canSelect", () => {
  const snapshot = activeSnapshot();

  it("permits feasible window candidates", () => {
    expect(canSelect(snapshot, "2")).toBe(true);
    expect(canSelect(snapshot, "5")).toBe(true);
  });

  it("blocks infeasible candidates", () => {
    expect(canSelect(snapshot, "3")).toBe(false);
  });

  it("blocks out-of-window codes", () => {
    expect(canSelect(snapshot, "99999")).toBe(false);
  });

  it("blocks everything once terminated", () => {
    expect(canSelect(terminalSnapshot(), "2")).toBe(false);
  });
});

describe("timeline", () => {
  it("has one entry per history item", () => {
    const snapshot = activeSnapshot();
    expect(timelineEntries(snapshot)).toHaveLength(snapshot.history.length);
    expect(timelineEntries(terminalSnapshot())).toHaveLength(3);
  });
});

describe("terminalManifestText", () => {
  it("lists final settings and the selection history", () => {
    const text = terminalManifestText(terminalSnapshot());
    expect(text).toContain("final_indices: 1,1,0");
    expect(text).toContain("final.sigma: 1");
    expect(text).toContain("selected.0: 2");
    expect(text.endsWith("\n")).toBe(true);
  });
});
