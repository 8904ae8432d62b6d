/**
 * Controller: owns the view state, serializes requests.
 *
 * One request is in flight at a time; tiles and the stop button are
 * disabled while waiting.  A rejected selection (422) surfaces as an
 * inline banner without losing the current window.
 */

import { ApiClient, ApiError } from "./api.js";
import { render, ViewState } from "./gallery.js";
import { Snapshot, canSelect } from "./model.js";

export class GalleryApp {
  private state: ViewState = { snapshot: null, error: null, busy: false, inspected: null };
  private sessionId: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  private repaint(): void {
    render(this.root, this.state, {
      onSelect: (code) => void this.select(code),
      onStop: () => void this.stop(),
      onInspect: (code) => {
        this.state.inspected = code;
        this.repaint();
      },
      onCloseDrawer: () => {
        this.state.inspected = null;
        this.repaint();
      },
    });
  }

  get snapshot(): Snapshot | null {
    return this.state.snapshot;
  }

  async start(): Promise<void> {
    this.repaint();
    try {
      const sessions = await this.api.listSessions();
      const active = sessions.find((s) => s.status === "active");
      const snapshot = active
        ? await this.api.getSnapshot(active.session_id)
        : await this.api.createSession();
      this.adopt(snapshot);
    } catch (error) {
      this.state.error = describe(error);
    }
    this.repaint();
  }

  private adopt(snapshot: Snapshot): void {
    this.state.snapshot = snapshot;
    this.state.error = null;
    this.state.inspected = null;
    this.sessionId = snapshot.session_id;
  }

  /** Returns true when a request was actually issued. */
  async select(code: string): Promise<boolean> {
    if (this.state.busy || this.sessionId === null) return false;
    if (this.state.snapshot === null || !canSelect(this.state.snapshot, code)) {
      return false; // the client-side gate mirrors the server's
    }
    return this.submit(code);
  }

  async stop(): Promise<boolean> {
    if (this.state.busy || this.sessionId === null) return false;
    return this.submit(null);
  }

  private async submit(code: string | null): Promise<boolean> {
    this.state.busy = true;
    this.repaint();
    try {
      const next = await this.api.postSelection(this.sessionId!, code);
      this.adopt(next);
    } catch (error) {
      this.state.error = describe(error); // keep the current view
    } finally {
      this.state.busy = false;
      this.repaint();
    }
    return true;
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  if (error instanceof Error) return error.message;
  return String(error);
}
