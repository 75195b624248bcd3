// Payload shapes served by the search service.

export type RetrievalMode = "api_link" | "library_link" | "bm25";

export interface ResultEntry {
  source: string;
  mode: RetrievalMode;
  score: number;
  content_id: string;
  title: string;
  url: string;
  snippet: string;
}

export interface LibraryRef {
  library_id: string;
  display_name: string;
}

export interface SearchResponse {
  query: string;
  resolved_libraries: LibraryRef[];
  results: Record<string, ResultEntry[]>;
}

export interface SourceInfo {
  source: string;
  display_name: string;
  linking_mode: "api_linked" | "library_linked" | "unlinked";
}
