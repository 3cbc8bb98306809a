/** Pure rendering: the DOM under the results container is a function of
 * ViewState and nothing else. Sentences render in the exact order the API
 * returned them; the client never sorts. */

import type { SentenceRecord, SortMode } from "./api.js";

export interface ViewState {
  sessionId: string | null;
  source: string;
  sortMode: SortMode;
  language: string | null;
  sentences: SentenceRecord[];
  sources: string[];
  error: string | null;
  busy: boolean;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    source: "Any",
    sortMode: "position",
    language: null,
    sentences: [],
    sources: [],
    error: null,
    busy: false,
  };
}

export function renderSourceOptions(select: HTMLSelectElement, state: ViewState): void {
  select.innerHTML = "";
  for (const name of state.sources) {
    const option = select.ownerDocument.createElement("option");
    option.value = name;
    option.textContent = name;
    option.selected = name === state.source;
    select.appendChild(option);
  }
}

export function renderResults(container: HTMLElement, state: ViewState): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";

  if (state.error) {
    const banner = doc.createElement("div");
    banner.className = "banner error";
    banner.setAttribute("role", "alert");
    banner.textContent = state.error;
    container.appendChild(banner);
  }

  if (!state.sessionId) {
    return;
  }

  const meta = doc.createElement("div");
  meta.className = "meta";
  meta.textContent = `${state.language ?? "?"} · ${state.sentences.length} sentences · mimicking ${state.source} · ${
    state.sortMode === "score" ? "most check-worthy first" : "natural order"
  }`;
  container.appendChild(meta);

  const list = doc.createElement("ol");
  list.className = "sentences";
  for (const record of state.sentences) {
    const item = doc.createElement("li");
    item.className = `sentence bin-${record.color_bin}`;
    item.dataset.index = String(record.index);

    const score = doc.createElement("span");
    score.className = "score";
    score.textContent = record.score.toFixed(3);

    const text = doc.createElement("span");
    text.className = "text";
    text.textContent = record.text;

    item.appendChild(score);
    item.appendChild(text);
    list.appendChild(item);
  }
  container.appendChild(list);
}
