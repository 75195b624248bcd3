// View models and DOM rendering for the tabbed results page.
//
// The pure builders (tabModels, cardModel, snippetHtml) carry all display
// logic so they can be tested without a browser; the render* functions only
// move those models into the DOM. Card order always equals response order:
// the server is the single ranking authority.

import type { SearchViewState } from "./search-controller.js";
import type { ResultEntry, SearchResponse, SourceInfo } from "./types.js";

export interface TabModel {
  source: string;
  displayName: string;
  count: number;
  active: boolean;
}

export interface CardModel {
  title: string;
  badge: string;
  score: string;
  url: string;
  snippetHtml: string;
  contentId: string;
}

const MODE_BADGES: Record<string, string> = {
  api_link: "API link",
  library_link: "library link",
  bm25: "text match",
};

export function modeBadge(mode: string): string {
  return MODE_BADGES[mode] ?? mode;
}

export function tabModels(
  sources: SourceInfo[],
  response: SearchResponse | null,
  activeTab: string | null,
): TabModel[] {
  return sources.map((info) => ({
    source: info.source,
    displayName: info.display_name,
    count: response?.results[info.source]?.length ?? 0,
    active: info.source === activeTab,
  }));
}

export function cardModel(entry: ResultEntry): CardModel {
  return {
    title: entry.title || entry.content_id,
    badge: modeBadge(entry.mode),
    score: entry.score.toFixed(4),
    url: entry.url,
    snippetHtml: snippetHtml(entry.snippet),
    contentId: entry.content_id,
  };
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// The service marks matched tokens as **token**; render them as <mark>.
export function snippetHtml(snippet: string): string {
  return escapeHtml(snippet).replace(/\*\*([^*]+)\*\*/g, "<mark>$1</mark>");
}

export function renderTabs(
  container: HTMLElement,
  state: SearchViewState,
  onSelect: (source: string) => void,
): void {
  container.textContent = "";
  for (const tab of tabModels(state.sources, state.response, state.activeTab)) {
    const button = document.createElement("button");
    button.className = tab.active ? "tab active" : "tab";
    button.textContent = `${tab.displayName} (${tab.count})`;
    button.dataset.source = tab.source;
    button.addEventListener("click", () => onSelect(tab.source));
    container.appendChild(button);
  }
}

export function renderResults(container: HTMLElement, state: SearchViewState): void {
  container.textContent = "";

  if (state.error) {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = `Search failed: ${state.error}`;
    container.appendChild(banner);
  }
  if (state.loading) {
    const loading = document.createElement("p");
    loading.className = "loading";
    loading.textContent = "Searching…";
    container.appendChild(loading);
    return;
  }
  if (!state.response || !state.activeTab) return;

  if (state.response.resolved_libraries.length > 0) {
    const libs = document.createElement("p");
    libs.className = "resolved-libraries";
    libs.textContent =
      "Resolved libraries: " +
      state.response.resolved_libraries.map((l) => l.display_name).join(", ");
    container.appendChild(libs);
  }

  const entries = state.response.results[state.activeTab] ?? [];
  if (entries.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No results from this source.";
    container.appendChild(empty);
    return;
  }

  for (const entry of entries) {
    container.appendChild(renderCard(cardModel(entry)));
  }
}

function renderCard(card: CardModel): HTMLElement {
  const element = document.createElement("article");
  element.className = "card";
  element.dataset.contentId = card.contentId;

  const heading = document.createElement("h3");
  const link = document.createElement("a");
  link.href = card.url;
  link.target = "_blank";
  link.rel = "noopener";
  link.textContent = card.title;
  heading.appendChild(link);

  const meta = document.createElement("p");
  meta.className = "meta";
  const badge = document.createElement("span");
  badge.className = "badge";
  badge.textContent = card.badge;
  meta.appendChild(badge);
  meta.appendChild(document.createTextNode(` score ${card.score}`));

  const snippet = document.createElement("p");
  snippet.className = "snippet";
  snippet.innerHTML = card.snippetHtml;

  element.appendChild(heading);
  element.appendChild(meta);
  element.appendChild(snippet);
  return element;
}
