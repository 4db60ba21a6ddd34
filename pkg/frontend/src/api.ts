// Thin client over the review service endpoints. The caller injects
// `fetch` so tests can drive the app against an in-memory server.

import type { LabelInfo, SaliencyPayload, SpanTriple, TaskView } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ConflictError extends ApiError {
  constructor(message: string) {
    super(message, 409);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchImpl(this.base + path, init);
    if (response.status === 409) {
      const body = await response.json().catch(() => ({ detail: "conflict" }));
      throw new ConflictError(String((body as { detail?: string }).detail ?? "conflict"));
    }
    if (!response.ok) {
      const body = await response.json().catch(() => ({ detail: response.statusText }));
      throw new ApiError(String((body as { detail?: string }).detail ?? "error"),
        response.status);
    }
    return response.json();
  }

  async labels(): Promise<LabelInfo[]> {
    const body = (await this.request("/api/labels")) as { labels: LabelInfo[] };
    return body.labels;
  }

  async nextTask(reviewer: string): Promise<TaskView | null> {
    const query = reviewer ? `?reviewer=${encodeURIComponent(reviewer)}` : "";
    const body = (await this.request(`/api/tasks/next${query}`)) as {
      task: TaskView | null;
    };
    return body.task;
  }

  async getAbstract(id: number | string): Promise<TaskView> {
    return (await this.request(`/api/abstracts/${id}`)) as TaskView;
  }

  async submitAnnotation(
    id: number | string,
    spans: SpanTriple[],
    expectedVersion: number,
    reviewer: string,
  ): Promise<number> {
    const body = (await this.request(`/api/abstracts/${id}/annotation`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        spans,
        expected_version: expectedVersion,
        reviewer,
      }),
    })) as { version: number };
    return body.version;
  }

  async finalize(id: number | string): Promise<TaskView> {
    return (await this.request(`/api/abstracts/${id}/finalize`, {
      method: "POST",
    })) as TaskView;
  }

  async saliency(id: number | string, sentenceIndex: number): Promise<SaliencyPayload> {
    return (await this.request(
      `/api/saliency/${id}/${sentenceIndex}`,
    )) as SaliencyPayload;
  }
}
