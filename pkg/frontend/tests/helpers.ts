import { readFileSync } from "node:fs";

export function loadFixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Fetch stub that records every URL and serves by exact path match. */
export class FetchRecorder {
  readonly urls: string[] = [];

  constructor(private readonly routes: Record<string, unknown>) {}

  fetch = (url: string): Promise<Response> => {
    this.urls.push(url);
    const path = url.split("?")[0];
    if (path in this.routes) {
      return Promise.resolve(jsonResponse(this.routes[path]));
    }
    return Promise.resolve(jsonResponse({ error: "not_found" }, 404));
  };

  lastQuery(): URLSearchParams {
    const last = this.urls[this.urls.length - 1];
    const idx = last.indexOf("?");
    return new URLSearchParams(idx < 0 ? "" : last.slice(idx + 1));
  }
}
