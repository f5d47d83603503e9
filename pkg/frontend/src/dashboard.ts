import { ApiError, PersonaClient } from "./api.js";
import type { ProfileSummary } from "./types.js";

export interface DashboardOptions {
  /** Replaces window.confirm in tests. */
  confirm?: (message: string) => boolean;
  /** Replaces window.prompt in tests. */
  prompt?: (message: string, current: string) => string | null;
}

/**
 * Profile dashboard: WOB band sizes, top-keyword table, topic list with
 * cluster badges, and the curation controls (delete keyword/topic, override
 * keyword frequency, force a rotation). All state is server-derived — every
 * mutation refetches the summary rather than patching the DOM optimistically.
 */
export class Dashboard {
  readonly element: HTMLElement;
  private readonly bands: HTMLElement;
  private readonly keywordTable: HTMLTableSectionElement;
  private readonly topicList: HTMLElement;
  private readonly message: HTMLElement;

  constructor(
    doc: Document,
    private readonly client: PersonaClient,
    private readonly options: DashboardOptions = {},
  ) {
    this.element = doc.createElement("section");
    this.element.className = "dashboard";

    this.bands = doc.createElement("p");
    this.bands.className = "wob-bands";

    const keywordHeading = doc.createElement("h2");
    keywordHeading.textContent = "Top keywords";
    const table = doc.createElement("table");
    const head = doc.createElement("thead");
    const headRow = doc.createElement("tr");
    for (const label of ["term", "frequency", "percentile", ""]) {
      const th = doc.createElement("th");
      th.textContent = label;
      headRow.append(th);
    }
    head.append(headRow);
    this.keywordTable = doc.createElement("tbody");
    table.append(head, this.keywordTable);

    const topicHeading = doc.createElement("h2");
    topicHeading.textContent = "Topics";
    this.topicList = doc.createElement("ul");
    this.topicList.className = "topics";

    const rotate = doc.createElement("button");
    rotate.textContent = "Rotate window";
    rotate.className = "rotate";
    rotate.addEventListener("click", () => {
      if (this.confirmAction("Rotate the window of observation?")) {
        void this.client.rotate().then(() => this.refresh());
      }
    });

    this.message = doc.createElement("p");
    this.message.className = "dashboard-message";

    this.element.append(
      this.bands,
      keywordHeading,
      table,
      topicHeading,
      this.topicList,
      rotate,
      this.message,
    );
  }

  private confirmAction(text: string): boolean {
    const ask = this.options.confirm ?? ((m: string) => window.confirm(m));
    return ask(text);
  }

  async refresh(): Promise<void> {
    const summary = await this.client.summary();
    this.render(summary);
  }

  private render(summary: ProfileSummary): void {
    const doc = this.element.ownerDocument;
    const { present, prev, old } = summary.wob_bands;
    this.bands.textContent =
      `window: ${present} present / ${prev} prev / ${old} old — ` +
      `${summary.counts.keywords} keywords, ${summary.counts.topics} topics`;
    this.message.textContent = "";

    this.keywordTable.replaceChildren(
      ...summary.top_keywords.map((kw) => {
        const row = doc.createElement("tr");
        row.dataset.term = kw.term;
        const term = doc.createElement("td");
        term.textContent = kw.term;
        const freq = doc.createElement("td");
        freq.className = "frequency";
        freq.textContent = String(kw.frequency);
        const pct = doc.createElement("td");
        pct.textContent = kw.percentile.toFixed(1);
        const actions = doc.createElement("td");
        const del = doc.createElement("button");
        del.textContent = "delete";
        del.className = "delete-keyword";
        del.addEventListener("click", () => void this.deleteKeyword(kw.term));
        const edit = doc.createElement("button");
        edit.textContent = "set frequency";
        edit.className = "override-keyword";
        edit.addEventListener("click", () =>
          void this.overrideKeyword(kw.term, kw.frequency),
        );
        actions.append(del, edit);
        row.append(term, freq, pct, actions);
        return row;
      }),
    );

    this.topicList.replaceChildren(
      ...summary.top_topics.map((topic) => {
        const item = doc.createElement("li");
        item.dataset.topic = topic.name;
        const name = doc.createElement("span");
        name.textContent = topic.name;
        const value = doc.createElement("span");
        value.className = "topic-value";
        value.textContent = topic.topic_value.toFixed(3);
        const cluster = doc.createElement("span");
        cluster.className = "cluster-badge";
        cluster.textContent = `cluster ${topic.cluster}`;
        const del = doc.createElement("button");
        del.textContent = "delete";
        del.className = "delete-topic";
        del.addEventListener("click", () => void this.deleteTopic(topic.name));
        item.append(name, value, cluster, del);
        return item;
      }),
    );
  }

  async deleteKeyword(term: string): Promise<void> {
    if (!this.confirmAction(`Delete keyword "${term}"?`)) return;
    try {
      await this.client.deleteKeyword(term);
    } catch (err) {
      this.showError(err);
      return;
    }
    await this.refresh();
  }

  async overrideKeyword(term: string, current: number): Promise<void> {
    const ask =
      this.options.prompt ?? ((m: string, c: string) => window.prompt(m, c));
    const answer = ask(`New frequency for "${term}"`, String(current));
    if (answer === null) return;
    const frequency = Number(answer);
    if (!Number.isInteger(frequency) || frequency < 1) {
      this.message.textContent = "frequency must be a positive integer";
      return;
    }
    try {
      await this.client.overrideKeyword(term, frequency);
    } catch (err) {
      this.showError(err);
      return;
    }
    await this.refresh();
  }

  async deleteTopic(name: string): Promise<void> {
    if (!this.confirmAction(`Delete topic "${name}"?`)) return;
    try {
      await this.client.deleteTopic(name);
    } catch (err) {
      this.showError(err);
      return;
    }
    await this.refresh();
  }

  private showError(err: unknown): void {
    this.message.textContent =
      err instanceof ApiError
        ? `${err.status}: ${err.message}`
        : "request failed";
  }
}
