/**
 * Snapshot types and the view-model layer.
 *
 * Everything here is pure: snapshots in, render-ready structures out.
 * The selection gate lives here too, so the UI can never issue a
 * request for an infeasible or out-of-window code.
 */

export type CandidateStatus = "feasible" | "infeasible" | "error";

export interface CandidateView {
  code: string;
  status: CandidateStatus;
  is_current: boolean;
  indices?: number[];
  values?: Record<string, number>;
  reason?: string;
  images?: Record<string, string>;
  thumbnail?: string | null;
}

export interface ActiveSnapshot {
  status: "active";
  session_id: string;
  iteration: number;
  code: string;
  indices: number[];
  values: Record<string, number>;
  shares: number[];
  window: CandidateView[];
  history: Array<[number, string]>;
}

export interface TerminalSnapshot {
  status: "terminated";
  session_id: string;
  iteration: number;
  final_indices: number[];
  final_values: Record<string, number>;
  history: Array<[number, string]>;
}

export type Snapshot = ActiveSnapshot | TerminalSnapshot;

export class SnapshotError extends Error {}

function isStringArrayPair(entry: unknown): entry is [number, string] {
  return (
    Array.isArray(entry) &&
    entry.length === 2 &&
    typeof entry[0] === "number" &&
    typeof entry[1] === "string"
  );
}

/** Validate a service response into a Snapshot, or throw SnapshotError. */
export function validateSnapshot(data: unknown): Snapshot {
  if (typeof data !== "object" || data === null) {
    throw new SnapshotError("snapshot is not an object");
  }
  const body = data as Record<string, unknown>;
  if (typeof body.session_id !== "string" || typeof body.iteration !== "number") {
    throw new SnapshotError("snapshot is missing session_id or iteration");
  }
  if (!Array.isArray(body.history) || !body.history.every(isStringArrayPair)) {
    throw new SnapshotError("snapshot history is malformed");
  }
  if (body.status === "terminated") {
    if (!Array.isArray(body.final_indices)) {
      throw new SnapshotError("terminal snapshot is missing final_indices");
    }
    return body as unknown as TerminalSnapshot;
  }
  if (body.status !== "active") {
    throw new SnapshotError(`unknown snapshot status ${String(body.status)}`);
  }
  if (typeof body.code !== "string" || !Array.isArray(body.window)) {
    throw new SnapshotError("active snapshot is missing code or window");
  }
  for (const entry of body.window as unknown[]) {
    const candidate = entry as Record<string, unknown>;
    if (typeof candidate.code !== "string" || typeof candidate.status !== "string") {
      throw new SnapshotError("window candidate is malformed");
    }
  }
  return body as unknown as ActiveSnapshot;
}

export interface Tile {
  code: string;
  selectable: boolean;
  current: boolean;
  status: CandidateStatus;
  caption: string;
  tooltip: string;
  thumbnail: string | null;
}

export function formatValues(values: Record<string, number> | undefined): string {
  if (!values) return "";
  return Object.entries(values)
    .map(([name, value]) => `${name}=${value}`)
    .join("  ");
}

/** One tile per window candidate; disabled tiles carry their reason. */
export function buildTiles(snapshot: ActiveSnapshot): Tile[] {
  return snapshot.window.map((candidate) => {
    const selectable = candidate.status === "feasible";
    return {
      code: candidate.code,
      selectable,
      current: candidate.is_current,
      status: candidate.status,
      caption: selectable || candidate.status === "error"
        ? formatValues(candidate.values)
        : "infeasible",
      tooltip: candidate.reason ?? formatValues(candidate.values),
      thumbnail: candidate.thumbnail ?? null,
    };
  });
}

/** The client-side selection gate, mirroring the server's checks. */
export function canSelect(snapshot: Snapshot, code: string): boolean {
  if (snapshot.status !== "active") return false;
  const candidate = snapshot.window.find((c) => c.code === code);
  return candidate !== undefined && candidate.status === "feasible";
}

export interface TimelineEntry {
  iteration: number;
  code: string;
}

export function timelineEntries(snapshot: Snapshot): TimelineEntry[] {
  return snapshot.history.map(([iteration, code]) => ({ iteration, code }));
}

/** Text manifest of a finished session, offered as a download. */
export function terminalManifestText(snapshot: TerminalSnapshot): string {
  const lines = [
    `session: ${snapshot.session_id}`,
    `iterations: ${snapshot.iteration}`,
    `final_indices: ${snapshot.final_indices.join(",")}`,
  ];
  for (const [name, value] of Object.entries(snapshot.final_values)) {
    lines.push(`final.${name}: ${value}`);
  }
  for (const [iteration, code] of snapshot.history) {
    lines.push(`selected.${iteration}: ${code}`);
  }
  return lines.join("\n") + "\n";
}
