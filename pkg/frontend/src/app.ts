/** Application wiring: text entry, mimic-source selector, and sort toggle.
 *
 * The server is the single ranking authority; every view change re-fetches
 * from the session endpoint. At most one view request is honored at a time:
 * responses carry a sequence number and stale ones are discarded. */

import { ApiError, type Client, type SortMode } from "./api.js";
import { initialState, renderResults, renderSourceOptions, type ViewState } from "./view.js";

export const APP_HTML = `
  <section class="entry">
    <h1>Check-worthiness ranking</h1>
    <textarea id="text-input" rows="8" placeholder="Paste a debate transcript, interview, or article (English or Arabic)"></textarea>
    <div class="controls">
      <button id="submit" disabled>Score sentences</button>
      <label>Mimic
        <select id="source-select"></select>
      </label>
      <label>Order
        <select id="sort-select">
          <option value="position">By position</option>
          <option value="score">By score</option>
        </select>
      </label>
    </div>
  </section>
  <section id="results" class="results"></section>
`;

export class App {
  private state: ViewState = initialState();
  private seq = 0;

  private textInput: HTMLTextAreaElement;
  private submitButton: HTMLButtonElement;
  private sourceSelect: HTMLSelectElement;
  private sortSelect: HTMLSelectElement;
  private results: HTMLElement;

  constructor(
    root: HTMLElement,
    private client: Client,
  ) {
    root.innerHTML = APP_HTML;
    this.textInput = root.querySelector("#text-input") as HTMLTextAreaElement;
    this.submitButton = root.querySelector("#submit") as HTMLButtonElement;
    this.sourceSelect = root.querySelector("#source-select") as HTMLSelectElement;
    this.sortSelect = root.querySelector("#sort-select") as HTMLSelectElement;
    this.results = root.querySelector("#results") as HTMLElement;

    this.textInput.addEventListener("input", () => this.syncSubmitEnabled());
    this.submitButton.addEventListener("click", () => void this.submit());
    this.sourceSelect.addEventListener("change", () => void this.changeView({ source: this.sourceSelect.value }));
    this.sortSelect.addEventListener("change", () =>
      void this.changeView({ sortMode: this.sortSelect.value as SortMode }),
    );
  }

  getState(): ViewState {
    return this.state;
  }

  async init(): Promise<void> {
    try {
      const sources = await this.client.sources();
      this.setState({ sources });
    } catch (err) {
      this.setState({ error: describe(err) });
    }
  }

  private setState(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    renderSourceOptions(this.sourceSelect, this.state);
    renderResults(this.results, this.state);
    this.syncSubmitEnabled();
  }

  private syncSubmitEnabled(): void {
    this.submitButton.disabled = this.textInput.value.trim() === "" || this.state.busy;
  }

  async submit(): Promise<void> {
    const text = this.textInput.value;
    if (!text.trim()) {
      return;
    }
    const mySeq = ++this.seq;
    this.setState({ busy: true, error: null });
    try {
      const res = await this.client.analyze(text, this.state.source);
      if (mySeq !== this.seq) {
        return; // superseded by a newer action; discard
      }
      this.setState({
        busy: false,
        sessionId: res.session_id,
        language: res.language,
        sentences: res.sentences,
        sortMode: "position",
      });
      this.sortSelect.value = "position";
    } catch (err) {
      if (mySeq !== this.seq) {
        return;
      }
      this.setState({ busy: false, error: describe(err) });
    }
  }

  async changeView(patch: { source?: string; sortMode?: SortMode }): Promise<void> {
    const source = patch.source ?? this.state.source;
    const sortMode = patch.sortMode ?? this.state.sortMode;
    if (!this.state.sessionId) {
      this.setState({ source, sortMode });
      return;
    }
    const mySeq = ++this.seq;
    this.setState({ busy: true, source, sortMode, error: null });
    try {
      const res = await this.client.view(this.state.sessionId, source, sortMode);
      if (mySeq !== this.seq) {
        return;
      }
      this.setState({ busy: false, sentences: res.sentences, language: res.language });
    } catch (err) {
      if (mySeq !== this.seq) {
        return;
      }
      if (err instanceof ApiError && err.status === 410) {
        this.setState({
          busy: false,
          sessionId: null,
          sentences: [],
          error: "This session has expired. Submit the text again to re-score it.",
        });
        return;
      }
      this.setState({ busy: false, error: describe(err) });
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.message;
  }
  return err instanceof Error ? err.message : String(err);
}
