import { PersonaClient } from "./api.js";
import { DwellTracker } from "./dwell.js";
import type { RankedResult } from "./types.js";

const SIGNAL_LABELS: [keyof RankedResult["signals"], string][] = [
  ["u_g", "url"],
  ["k_w", "keywords"],
  ["t_v", "topic"],
  ["o_v", "offline"],
  ["w_r", "web rank"],
  ["s_g", "pattern"],
];

export interface SearchPageOptions {
  /** Called instead of window.open in tests. */
  openTarget?: (url: string) => void;
}

/**
 * The search page: query box, ranked result list with explain bars, and the
 * click-feedback loop. Results are rendered strictly in the order the API
 * returns them; the page holds no ranking state of its own.
 */
export class SearchPage {
  readonly element: HTMLElement;
  private readonly form: HTMLFormElement;
  private readonly input: HTMLInputElement;
  private readonly status: HTMLElement;
  private readonly list: HTMLElement;
  private readonly dwell: DwellTracker;
  private inFlight = false;
  private currentQuery = "";

  constructor(
    doc: Document,
    private readonly client: PersonaClient,
    private readonly options: SearchPageOptions = {},
    dwell?: DwellTracker,
  ) {
    this.dwell = dwell ?? new DwellTracker();
    this.element = doc.createElement("section");
    this.element.className = "search-page";

    this.form = doc.createElement("form");
    this.input = doc.createElement("input");
    this.input.type = "search";
    this.input.name = "query";
    this.input.placeholder = "search…";
    const button = doc.createElement("button");
    button.type = "submit";
    button.textContent = "Search";
    this.form.append(this.input, button);

    this.status = doc.createElement("p");
    this.status.className = "status-line";
    this.list = doc.createElement("ol");
    this.list.className = "results";
    this.element.append(this.form, this.status, this.list);

    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.runSearch(this.input.value);
    });
    doc.addEventListener("visibilitychange", () => {
      this.dwell.onVisibilityChange(doc.hidden);
    });
  }

  async runSearch(query: string): Promise<void> {
    const trimmed = query.trim();
    if (!trimmed || this.inFlight) return; // at most one in-flight search
    this.inFlight = true;
    this.status.textContent = "searching…";
    try {
      const response = await this.client.search(trimmed);
      this.currentQuery = response.query;
      this.render(response.results);
      this.status.textContent = `${response.results.length} results for "${response.query}"`;
    } catch (err) {
      this.list.replaceChildren();
      this.status.textContent =
        err instanceof Error ? err.message : "search failed";
      throw err;
    } finally {
      this.inFlight = false;
    }
  }

  private render(results: RankedResult[]): void {
    const doc = this.element.ownerDocument;
    this.list.replaceChildren(
      ...results.map((result) => this.renderResult(doc, result)),
    );
  }

  private renderResult(doc: Document, result: RankedResult): HTMLElement {
    const item = doc.createElement("li");
    item.className = "result";
    item.dataset.url = result.url;

    const link = doc.createElement("a");
    link.href = result.url;
    link.textContent = result.title;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      void this.handleClick(result);
    });

    const badge = doc.createElement("span");
    badge.className = "rank-badge";
    badge.textContent =
      result.revised_rank === result.original_rank
        ? `#${result.revised_rank}`
        : `#${result.revised_rank} (was #${result.original_rank})`;

    const grade = doc.createElement("span");
    grade.className = "grade";
    grade.textContent = result.grade.toFixed(3);

    const snippet = doc.createElement("p");
    snippet.className = "snippet";
    snippet.textContent = result.snippet;

    const bars = doc.createElement("div");
    bars.className = "signal-bars";
    for (const [key, label] of SIGNAL_LABELS) {
      const row = doc.createElement("div");
      row.className = "signal";
      row.dataset.signal = key;
      const name = doc.createElement("span");
      name.textContent = label;
      const bar = doc.createElement("span");
      bar.className = "bar";
      const value = Math.min(1, Math.max(0, result.signals[key]));
      bar.style.width = `${(value * 100).toFixed(1)}%`;
      bar.title = result.signals[key].toFixed(4);
      row.append(name, bar);
      bars.append(row);
    }

    item.append(badge, link, grade, snippet, bars);
    return item;
  }

  private async handleClick(result: RankedResult): Promise<void> {
    this.dwell.cancel();
    const measured = this.dwell.begin();
    const open = this.options.openTarget ?? ((url: string) => {
      window.open(url, "_blank", "noopener");
    });
    open(result.url);
    const dwellSeconds = await measured;
    await this.client.sendClick({
      query: this.currentQuery,
      url: result.url,
      dwell_seconds: dwellSeconds,
    });
  }
}
