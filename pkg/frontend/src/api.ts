import type { SearchResponse, SourceInfo } from "./types.js";

async function fetchJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = (await response.json()) as { error?: string };
      if (body.error) detail = body.error;
    } catch {
      // non-JSON error body; keep the status code
    }
    throw new Error(detail);
  }
  return (await response.json()) as T;
}

export function searchApi(query: string, k?: number): Promise<SearchResponse> {
  const params = new URLSearchParams({ api: query });
  if (k !== undefined) params.set("k", String(k));
  return fetchJson<SearchResponse>(`/api/search?${params.toString()}`);
}

export function listSources(): Promise<SourceInfo[]> {
  return fetchJson<SourceInfo[]>("/api/sources");
}
