import { listSources, searchApi } from "./api.js";
import { SearchController } from "./search-controller.js";
import { renderResults, renderTabs } from "./view.js";

function requireElement<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing #${id}`);
  return element as T;
}

async function boot(): Promise<void> {
  const input = requireElement<HTMLInputElement>("search-input");
  const tabs = requireElement<HTMLDivElement>("tabs");
  const results = requireElement<HTMLDivElement>("results");

  const controller = new SearchController({
    search: searchApi,
    onChange: (state) => {
      renderTabs(tabs, state, (source) => controller.selectTab(source));
      renderResults(results, state);
    },
  });

  input.addEventListener("input", () => controller.onInput(input.value));

  try {
    controller.setSources(await listSources());
  } catch (error) {
    results.textContent = `Cannot reach the search service: ${String(error)}`;
  }
}

void boot();
