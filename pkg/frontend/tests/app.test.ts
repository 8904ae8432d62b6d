import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { GalleryApp } from "../src/app.js";
import { activeSnapshot, jsonResponse, terminalSnapshot } from "./fixtures.js";

let root: HTMLElement;
const fetchMock = vi.fn();

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app")!;
  fetchMock.mockReset();
  vi.stubGlobal("fetch", fetchMock);
});

afterEach(() => {
  vi.unstubAllGlobals();
});

async function startedApp(): Promise<GalleryApp> {
  // No session listed yet, so the app creates one from the default.
  fetchMock.mockResolvedValueOnce(jsonResponse({ sessions: [] }));
  fetchMock.mockResolvedValueOnce(jsonResponse(activeSnapshot()));
  const app = new GalleryApp(root, new ApiClient());
  await app.start();
  return app;
}

describe("startup", () => {
  it("creates a session when none exists and renders its window", async () => {
    await startedApp();
    expect(fetchMock).toHaveBeenCalledTimes(2);
    expect(fetchMock.mock.calls[1][0]).toBe("/sessions");
    expect(root.querySelectorAll(".tile")).toHaveLength(5);
    expect(root.querySelector(".badge.iteration")!.textContent).toContain("2");
  });

  it("re-attaches to an existing active session", async () => {
    fetchMock.mockResolvedValueOnce(
      jsonResponse({ sessions: [{ session_id: "abc123", status: "active" }] }),
    );
    fetchMock.mockResolvedValueOnce(jsonResponse(activeSnapshot()));
    await new GalleryApp(root, new ApiClient()).start();
    expect(fetchMock.mock.calls[1][0]).toBe("/sessions/abc123");
  });

  it("shows an error banner when the service is unreachable", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse({ detail: "boom" }, 500));
    await new GalleryApp(root, new ApiClient()).start();
    expect(root.querySelector(".banner.error")!.textContent).toContain("500");
  });

  it("shows a render-error banner on a malformed snapshot", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse({ sessions: [] }));
    fetchMock.mockResolvedValueOnce(jsonResponse({ nonsense: true }));
    await new GalleryApp(root, new ApiClient()).start();
    expect(root.querySelector(".banner.error")).not.toBeNull();
    expect(root.querySelectorAll(".tile")).toHaveLength(0);
  });
});

describe("selection", () => {
  it("posts the clicked candidate's code and re-renders on its window", async () => {
    const app = await startedApp();
    const next = activeSnapshot({
      iteration: 3,
      code: "2",
      indices: [0, 1, 0],
      history: [
        [0, "2"],
        [1, "5"],
        [2, "2"],
      ],
    });
    fetchMock.mockResolvedValueOnce(jsonResponse(next));
    root.querySelector<HTMLButtonElement>('.tile[data-code="2"]')!.click();
    await vi.waitFor(() => {
      expect(root.querySelector(".badge.code")!.textContent).toContain("#2");
    });
    const [url, init] = fetchMock.mock.calls[2];
    expect(url).toBe("/sessions/abc123/selection");
    expect(JSON.parse(init.body as string)).toEqual({ code: "2" });
    expect(root.querySelector(".badge.iteration")!.textContent).toContain("3");
    expect(root.querySelectorAll(".timeline .step")).toHaveLength(3);
    expect(app.snapshot?.status).toBe("active");
  });

  it("never issues a request for an infeasible or unknown code", async () => {
    const app = await startedApp();
    expect(await app.select("3")).toBe(false);
    expect(await app.select("424242")).toBe(false);
    expect(fetchMock).toHaveBeenCalledTimes(2); // startup only
  });

  it("keeps the current view and shows the reason on a 422", async () => {
    await startedApp();
    fetchMock.mockResolvedValueOnce(jsonResponse({ detail: "code 2 is stale" }, 422));
    root.querySelector<HTMLButtonElement>('.tile[data-code="2"]')!.click();
    await vi.waitFor(() => {
      expect(root.querySelector(".banner.error")).not.toBeNull();
    });
    expect(root.querySelector(".banner.error")!.textContent).toContain("422");
    expect(root.querySelector(".badge.iteration")!.textContent).toContain("2");
    expect(root.querySelectorAll(".tile")).toHaveLength(5);
  });

  it("allows only one request in flight", async () => {
    const app = await startedApp();
    let release!: (value: Response) => void;
    fetchMock.mockReturnValueOnce(new Promise<Response>((resolve) => (release = resolve)));
    const first = app.select("2");
    expect(await app.select("4")).toBe(false); // busy
    expect(fetchMock).toHaveBeenCalledTimes(3);
    release(jsonResponse(activeSnapshot({ iteration: 3, code: "2" })));
    expect(await first).toBe(true);
  });
});

describe("stop", () => {
  it("renders the terminal summary with the final settings", async () => {
    await startedApp();
    fetchMock.mockResolvedValueOnce(
      jsonResponse(terminalSnapshot({ final_indices: [1, 1, 0] })),
    );
    root.querySelector<HTMLButtonElement>(".stop")!.click();
    await vi.waitFor(() => {
      expect(root.querySelector(".terminal")).not.toBeNull();
    });
    const [url, init] = fetchMock.mock.calls[2];
    expect(url).toBe("/sessions/abc123/selection");
    expect(JSON.parse(init.body as string)).toEqual({ code: null });
    expect(root.querySelector(".final-indices")!.textContent).toContain("[1, 1, 0]");
    expect(root.querySelector<HTMLAnchorElement>(".download")).not.toBeNull();
  });
});
