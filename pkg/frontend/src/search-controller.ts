// Search state machine: debounced dispatch, stale-response discard, tab state.
//
// The controller is deliberately DOM-free. Timers and the search call are
// injected so tests can drive keystroke/response interleavings explicitly.

import type { SearchResponse, SourceInfo } from "./types.js";

export const DEBOUNCE_MS = 400;

export interface SearchViewState {
  query: string;
  loading: boolean;
  error: string | null;
  response: SearchResponse | null;
  activeTab: string | null;
  sources: SourceInfo[];
}

export interface Scheduler {
  set(callback: () => void, ms: number): number;
  clear(id: number): void;
}

const realScheduler: Scheduler = {
  set: (callback, ms) => setTimeout(callback, ms) as unknown as number,
  clear: (id) => clearTimeout(id),
};

export interface SearchControllerOptions {
  search: (query: string) => Promise<SearchResponse>;
  onChange: (state: SearchViewState) => void;
  debounceMs?: number;
  scheduler?: Scheduler;
}

export class SearchController {
  private readonly search: (query: string) => Promise<SearchResponse>;
  private readonly onChange: (state: SearchViewState) => void;
  private readonly debounceMs: number;
  private readonly scheduler: Scheduler;

  private timerId: number | null = null;
  private latestSeq = 0;
  private state: SearchViewState = {
    query: "",
    loading: false,
    error: null,
    response: null,
    activeTab: null,
    sources: [],
  };

  constructor(options: SearchControllerOptions) {
    this.search = options.search;
    this.onChange = options.onChange;
    this.debounceMs = options.debounceMs ?? DEBOUNCE_MS;
    this.scheduler = options.scheduler ?? realScheduler;
  }

  getState(): SearchViewState {
    return this.state;
  }

  setSources(sources: SourceInfo[]): void {
    const activeTab =
      this.state.activeTab && sources.some((s) => s.source === this.state.activeTab)
        ? this.state.activeTab
        : sources[0]?.source ?? null;
    this.commit({ ...this.state, sources, activeTab });
  }

  selectTab(source: string): void {
    if (!this.state.sources.some((s) => s.source === source)) return;
    this.commit({ ...this.state, activeTab: source });
  }

  // One call per keystroke; the request fires only after a full pause.
  onInput(text: string): void {
    this.cancelPending();
    const query = text.trim();
    if (!query) {
      // Clearing the input also invalidates any in-flight response.
      this.latestSeq += 1;
      this.commit({ ...this.state, query: text, loading: false, error: null, response: null });
      return;
    }
    this.commit({ ...this.state, query: text });
    this.timerId = this.scheduler.set(() => {
      this.timerId = null;
      this.dispatch(query);
    }, this.debounceMs);
  }

  private dispatch(query: string): void {
    const seq = ++this.latestSeq;
    this.commit({ ...this.state, loading: true, error: null });
    this.search(query).then(
      (response) => {
        if (seq !== this.latestSeq) return; // superseded by a newer query
        this.commit({ ...this.state, loading: false, error: null, response });
      },
      (error: unknown) => {
        if (seq !== this.latestSeq) return;
        const message = error instanceof Error ? error.message : String(error);
        this.commit({ ...this.state, loading: false, error: message });
      },
    );
  }

  private cancelPending(): void {
    if (this.timerId !== null) {
      this.scheduler.clear(this.timerId);
      this.timerId = null;
    }
  }

  private commit(state: SearchViewState): void {
    this.state = state;
    this.onChange(state);
  }
}
