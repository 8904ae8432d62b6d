import { ActiveSnapshot, TerminalSnapshot } from "../src/model.js";

export function activeSnapshot(overrides: Partial<ActiveSnapshot> = {}): ActiveSnapshot {
  return {
    status: "active",
    session_id: "abc123",
    iteration: 2,
    code: "5",
    indices: [1, 1, 0],
    values: { sigma: 1.0, downsample: 2, threshold: 0 },
    shares: [1, 1, 1],
    window: [
      {
        code: "2",
        status: "feasible",
        is_current: false,
        indices: [0, 1, 0],
        values: { sigma: 0.5, downsample: 2, threshold: 0 },
        images: { veni: "/i/2/veni", vidi: "/i/2/vidi", vici: "/i/2/vici" },
        thumbnail: "/i/2/vici",
      },
      {
        code: "3",
        status: "infeasible",
        is_current: false,
        reason: "veni: arity 2 != share 1",
      },
      {
        code: "4",
        status: "feasible",
        is_current: false,
        indices: [0, 0, 1],
        values: { sigma: 0.5, downsample: 1, threshold: 16 },
        images: { veni: "/i/4/veni", vidi: "/i/4/vidi", vici: "/i/4/vici" },
        thumbnail: "/i/4/vici",
      },
      {
        code: "5",
        status: "feasible",
        is_current: true,
        indices: [1, 1, 0],
        values: { sigma: 1.0, downsample: 2, threshold: 0 },
        images: { veni: "/i/5/veni", vidi: "/i/5/vidi", vici: "/i/5/vici" },
        thumbnail: "/i/5/vici",
      },
      {
        code: "6",
        status: "infeasible",
        is_current: false,
        reason: "vidi: arity 2 != share 1",
      },
    ],
    history: [
      [0, "2"],
      [1, "5"],
    ],
    ...overrides,
  };
}

export function terminalSnapshot(overrides: Partial<TerminalSnapshot> = {}): TerminalSnapshot {
  return {
    status: "terminated",
    session_id: "abc123",
    iteration: 3,
    final_indices: [1, 1, 0],
    final_values: { sigma: 1.0, downsample: 2, threshold: 0 },
    history: [
      [0, "2"],
      [1, "5"],
      [2, "5"],
    ],
    ...overrides,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
