// API base resolution: an explicit value wins, then a runtime global set by
// the hosting page (window.__M2LADS_API_BASE_URL), then same-origin "".

export function resolveApiBase(explicit?: string): string {
  if (explicit !== undefined) {
    return stripTrailingSlash(explicit);
  }
  const injected = (globalThis as { __M2LADS_API_BASE_URL?: unknown }).__M2LADS_API_BASE_URL;
  if (typeof injected === "string") {
    return stripTrailingSlash(injected);
  }
  return "";
}

function stripTrailingSlash(base: string): string {
  return base.endsWith("/") ? base.slice(0, -1) : base;
}
