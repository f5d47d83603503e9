import type {
  ClickFeedback,
  IngestReport,
  ProfileSummary,
  SearchResponse,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** Raised for any non-2xx response; carries the HTTP status for inline display. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function fail(response: Response): Promise<never> {
  let detail = response.statusText || `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

/**
 * Thin typed client over the service's JSON API. Every mutation the UI can
 * perform goes through one of these methods — there is no other backend.
 */
export class PersonaClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) await fail(response);
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.request(path, init);
    return (await response.json()) as T;
  }

  summary(): Promise<ProfileSummary> {
    return this.json("/api/profile/summary");
  }

  search(query: string, n?: number): Promise<SearchResponse> {
    return this.json("/api/search", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(n === undefined ? { query } : { query, n }),
    });
  }

  /**
   * Posts click feedback. Fire-and-forget semantics with a single retry on
   * network failure; a second failure is swallowed (the click must still
   * open the target even when the service is flaky).
   */
  async sendClick(feedback: ClickFeedback): Promise<boolean> {
    const post = () =>
      this.request("/api/feedback/click", {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(feedback),
      });
    try {
      await post();
      return true;
    } catch (first) {
      if (first instanceof ApiError) return false; // server said no; don't repeat it
      try {
        await post();
        return true;
      } catch {
        return false;
      }
    }
  }

  ingestHistory(jsonLines: string): Promise<IngestReport> {
    return this.json("/api/ingest/history", {
      method: "POST",
      headers: { "content-type": "application/x-ndjson" },
      body: jsonLines,
    });
  }

  async deleteKeyword(term: string): Promise<void> {
    await this.request(`/api/profile/keyword/${encodeURIComponent(term)}`, {
      method: "DELETE",
    });
  }

  overrideKeyword(
    term: string,
    frequency: number,
  ): Promise<{ term: string; frequency: number; percentile: number }> {
    return this.json(`/api/profile/keyword/${encodeURIComponent(term)}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ frequency }),
    });
  }

  async deleteTopic(name: string): Promise<void> {
    await this.request(`/api/profile/topic/${encodeURIComponent(name)}`, {
      method: "DELETE",
    });
  }

  rotate(): Promise<ProfileSummary> {
    return this.json("/api/profile/rotate", { method: "POST" });
  }
}
