/** Typed client for the evolution-graph HTTP API.
 *
 * All browser data access goes through this client; it never talks to a
 * block explorer directly. Identical in-flight GETs are deduplicated, and
 * per-channel sequence numbers let callers discard stale responses when a
 * newer request for the same pane has already been issued.
 */

import type {
  ApiErrorBody,
  Lineage,
  ProxiesPage,
  SourceBundle,
  Stats,
  Subgraph,
} from "./types.js";

export type FetchLike = (url: string) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.status = body.status;
    this.code = body.code;
  }
}

export interface ProxyFilter {
  type?: string;
  min_versions?: number;
  vulnerability?: string;
  q?: string;
  limit?: number;
  offset?: number;
}

function queryString(params: Record<string, string | number | undefined>): string {
  const search = new URLSearchParams();
  for (const key of Object.keys(params).sort()) {
    const value = params[key];
    if (value !== undefined && value !== "") search.set(key, String(value));
  }
  const text = search.toString();
  return text ? `?${text}` : "";
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private readonly inFlight = new Map<string, Promise<unknown>>();
  private readonly sequences = new Map<string, number>();
  /** Count of fetches actually issued (dedup hits excluded); used by tests. */
  requestCount = 0;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((url) => fetch(url));
  }

  private async get<T>(path: string): Promise<T> {
    const url = `${this.baseUrl}${path}`;
    const pending = this.inFlight.get(url);
    if (pending) return pending as Promise<T>;
    const promise = (async () => {
      this.requestCount += 1;
      const response = await this.fetchFn(url);
      const body = await response.json();
      if (!response.ok) throw new ApiError(body as ApiErrorBody);
      return body as T;
    })();
    this.inFlight.set(url, promise);
    try {
      return await promise;
    } finally {
      this.inFlight.delete(url);
    }
  }

  /** Run `work` tagged with a per-channel sequence number. The result is
   * delivered only if no newer call on the same channel has started since;
   * stale results resolve to null instead. */
  async latest<T>(channel: string, work: () => Promise<T>): Promise<T | null> {
    const seq = (this.sequences.get(channel) ?? 0) + 1;
    this.sequences.set(channel, seq);
    const result = await work();
    return this.sequences.get(channel) === seq ? result : null;
  }

  searchProxies(filter: ProxyFilter = {}): Promise<ProxiesPage> {
    return this.get(`/api/v1/proxies${queryString({ ...filter })}`);
  }

  lineage(address: string): Promise<Lineage> {
    return this.get(`/api/v1/contracts/${address}/lineage`);
  }

  graph(address: string, depth = 2): Promise<Subgraph> {
    return this.get(`/api/v1/graph/${address}${queryString({ depth })}`);
  }

  source(address: string): Promise<SourceBundle> {
    return this.get(`/api/v1/contracts/${address}/source`);
  }

  stats(): Promise<Stats> {
    return this.get("/api/v1/stats");
  }
}

export function isValidAddress(text: string): boolean {
  return /^0x[0-9a-fA-F]{40}$/.test(text);
}
