/**
 * DOM rendering: snapshot in, gallery out.
 *
 * Rendering is stateless; the controller owns the state and re-renders
 * into the root element after every change.
 */

import {
  ActiveSnapshot,
  Snapshot,
  TerminalSnapshot,
  Tile,
  buildTiles,
  formatValues,
  terminalManifestText,
  timelineEntries,
} from "./model.js";

export interface Handlers {
  onSelect: (code: string) => void;
  onStop: () => void;
  onInspect: (code: string) => void;
  onCloseDrawer: () => void;
}

export interface ViewState {
  snapshot: Snapshot | null;
  error: string | null;
  busy: boolean;
  inspected: string | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderErrorBanner(message: string): HTMLElement {
  const banner = el("div", "banner error", message);
  banner.setAttribute("role", "alert");
  return banner;
}

function renderTile(tile: Tile, busy: boolean, handlers: Handlers): HTMLElement {
  const node = el("button", "tile");
  node.dataset.code = tile.code;
  node.dataset.status = tile.status;
  if (tile.current) node.classList.add("current");
  if (!tile.selectable) {
    node.classList.add("disabled");
    node.disabled = true;
    node.title = tile.tooltip;
  } else {
    node.disabled = busy;
    node.title = tile.tooltip;
    node.addEventListener("click", () => handlers.onSelect(tile.code));
  }
  if (tile.thumbnail) {
    const img = el("img", "thumb");
    img.src = tile.thumbnail;
    img.alt = `candidate ${tile.code}`;
    node.appendChild(img);
  } else {
    node.appendChild(el("div", "thumb placeholder", tile.status));
  }
  node.appendChild(el("div", "code", `#${tile.code}`));
  node.appendChild(el("div", "caption", tile.caption));
  if (tile.selectable) {
    const inspect = el("span", "inspect", "detail");
    inspect.addEventListener("click", (event) => {
      event.stopPropagation();
      handlers.onInspect(tile.code);
    });
    node.appendChild(inspect);
  }
  return node;
}

function renderTimeline(snapshot: Snapshot): HTMLElement {
  const timeline = el("div", "timeline");
  timeline.appendChild(el("span", "label", "history:"));
  for (const entry of timelineEntries(snapshot)) {
    timeline.appendChild(el("span", "step", `${entry.iteration}→#${entry.code}`));
  }
  return timeline;
}

function renderDrawer(snapshot: ActiveSnapshot, code: string, handlers: Handlers): HTMLElement {
  const drawer = el("div", "drawer");
  const candidate = snapshot.window.find((c) => c.code === code);
  const close = el("button", "close", "close");
  close.addEventListener("click", () => handlers.onCloseDrawer());
  drawer.appendChild(close);
  if (!candidate || !candidate.images) {
    drawer.appendChild(el("div", "banner error", `no detail for candidate ${code}`));
    return drawer;
  }
  drawer.appendChild(el("h3", undefined, `candidate #${code}`));
  drawer.appendChild(el("div", "drawer-values", formatValues(candidate.values)));
  const row = el("div", "drawer-images");
  for (const [phase, url] of Object.entries(candidate.images)) {
    const figure = el("figure");
    const img = el("img");
    img.src = url;
    img.alt = `${phase} of ${code}`;
    figure.appendChild(img);
    figure.appendChild(el("figcaption", undefined, phase));
    row.appendChild(figure);
  }
  drawer.appendChild(row);
  return drawer;
}

function renderActive(snapshot: ActiveSnapshot, state: ViewState, handlers: Handlers): HTMLElement[] {
  const header = el("div", "header");
  header.appendChild(el("span", "badge iteration", `iteration ${snapshot.iteration}`));
  header.appendChild(el("span", "badge code", `code #${snapshot.code}`));
  header.appendChild(el("span", "badge values", formatValues(snapshot.values)));
  const stop = el("button", "stop", "Stop (keep current settings)");
  stop.disabled = state.busy;
  stop.addEventListener("click", () => handlers.onStop());
  header.appendChild(stop);

  const grid = el("div", "gallery");
  for (const tile of buildTiles(snapshot)) {
    grid.appendChild(renderTile(tile, state.busy, handlers));
  }

  const parts = [header, grid, renderTimeline(snapshot)];
  if (state.inspected !== null) {
    parts.push(renderDrawer(snapshot, state.inspected, handlers));
  }
  return parts;
}

function renderTerminal(snapshot: TerminalSnapshot): HTMLElement[] {
  const panel = el("div", "terminal");
  panel.appendChild(el("h2", undefined, "session finished"));
  panel.appendChild(
    el("div", "final-indices", `final indices: [${snapshot.final_indices.join(", ")}]`),
  );
  panel.appendChild(el("div", "final-values", formatValues(snapshot.final_values)));
  const link = el("a", "download", "download summary");
  link.href =
    "data:text/plain;charset=utf-8," + encodeURIComponent(terminalManifestText(snapshot));
  link.setAttribute("download", `vvv-${snapshot.session_id}.txt`);
  panel.appendChild(link);
  return [panel, renderTimeline(snapshot)];
}

/** Repaint the whole app into `root`. */
export function render(root: HTMLElement, state: ViewState, handlers: Handlers): void {
  root.replaceChildren();
  if (state.error !== null) {
    root.appendChild(renderErrorBanner(state.error));
  }
  if (state.snapshot === null) {
    if (state.error === null) root.appendChild(el("div", "banner", "loading session..."));
    return;
  }
  const parts =
    state.snapshot.status === "active"
      ? renderActive(state.snapshot, state, handlers)
      : renderTerminal(state.snapshot);
  for (const part of parts) root.appendChild(part);
}
