/** In-memory backend fixture: one Eip1967 proxy whose implementation
 * history is [A, B, A] (three versions, two observed changes), served
 * through a fake fetch that mimics the HTTP API's published shapes. */

import type { FetchLike } from "../src/api.js";
import type {
  ApiErrorBody,
  Lineage,
  ProxiesPage,
  SourceBundle,
  Subgraph,
} from "../src/types.js";

export const PROXY = "0x" + "ab".repeat(20);
export const IMPL_A = "0x" + "0a".repeat(20);
export const IMPL_B = "0x" + "0b".repeat(20);

const proxyNode = {
  address: PROXY,
  proxy_type: "Eip1967" as const,
  created_at: 1_700_000_000,
  total_versions: 3,
  evidence: ["slot-constant-in-code", "delegatecall-present"],
};

function versionNode(n: number, impl: string, txs: number) {
  return {
    proxy: PROXY,
    version_number: n,
    contract_address: impl,
    creation_timestamp: 1_700_000_000 + n * 1000,
    last_tx_timestamp: 1_700_005_000 + n * 1000,
    total_transactions: txs,
    vulnerabilities: n === 1 ? ["reentrancy"] : [],
  };
}

function changeEdge(from: number, to: number, categories: string[]) {
  return {
    proxy: PROXY,
    from_version: from,
    to_version: to,
    categories,
    evidence: categories.map((c) => `evidence-for-${c}`),
  };
}

export const lineageFixture: Lineage = {
  proxy: proxyNode,
  versions: [
    { version: versionNode(1, IMPL_A, 12), change: null },
    { version: versionNode(2, IMPL_B, 7), change: changeEdge(1, 2, ["VulnerabilityFix"]) as Lineage["versions"][number]["change"] },
    { version: versionNode(3, IMPL_A, 3), change: changeEdge(2, 3, ["Other"]) as Lineage["versions"][number]["change"] },
  ],
};

export const graphFixture: Subgraph = {
  nodes: [
    { id: `proxy:${PROXY}`, type: "proxy", label: PROXY, attributes: proxyNode },
    ...lineageFixture.versions.map((item) => ({
      id: `version:${PROXY}:${item.version.version_number}`,
      type: "version" as const,
      label: `v${item.version.version_number} ${item.version.contract_address}`,
      attributes: item.version,
    })),
  ],
  edges: [
    ...lineageFixture.versions.map((item) => ({
      source: `proxy:${PROXY}`,
      target: `version:${PROXY}:${item.version.version_number}`,
      kind: "implements" as const,
    })),
    {
      source: `version:${PROXY}:1`,
      target: `version:${PROXY}:2`,
      kind: "observed_change" as const,
      categories: ["VulnerabilityFix"],
      evidence: ["evidence-for-VulnerabilityFix"],
    },
    {
      source: `version:${PROXY}:2`,
      target: `version:${PROXY}:3`,
      kind: "observed_change" as const,
      categories: ["Other"],
      evidence: ["evidence-for-Other"],
    },
  ],
};

export const proxiesPageFixture: ProxiesPage = {
  items: [proxyNode],
  total: 1,
  limit: 50,
  offset: 0,
};

function sourceBundle(address: string, name: string): SourceBundle {
  return {
    address,
    verified: true,
    source_text: `pragma solidity ^0.8.0;\ncontract ${name} { function run() public {} }\n`,
    compiler_version: "v0.8.19",
    contract_name: name,
    fetched_at: 1_700_010_000,
    origin: "fixture",
  };
}

export const sources: Record<string, SourceBundle> = {
  [IMPL_A]: sourceBundle(IMPL_A, "TokenV1"),
  [IMPL_B]: sourceBundle(IMPL_B, "TokenV2"),
};

function jsonResponse(status: number, body: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  } as unknown as Response;
}

function errorBody(status: number, code: ApiErrorBody["code"], message: string): ApiErrorBody {
  return { status, code, message };
}

export interface FixtureServer {
  fetch: FetchLike;
  /** Every URL the fake fetch has served, in order. */
  requests: string[];
  /** When true, /source answers 502 upstream_unavailable. */
  sourceDown: boolean;
}

export function makeFixtureServer(): FixtureServer {
  const server: FixtureServer = { requests: [], sourceDown: false, fetch: undefined! };
  server.fetch = async (url: string) => {
    server.requests.push(url);
    const [path] = url.split("?");
    if (path === "/api/v1/proxies") return jsonResponse(200, proxiesPageFixture);
    let match = path.match(/^\/api\/v1\/contracts\/(0x[0-9a-f]{40})\/lineage$/);
    if (match) {
      if (match[1] !== PROXY) {
        return jsonResponse(404, errorBody(404, "not_found", `unknown proxy ${match[1]}`));
      }
      return jsonResponse(200, lineageFixture);
    }
    match = path.match(/^\/api\/v1\/graph\/(0x[0-9a-f]{40})$/);
    if (match) {
      if (match[1] !== PROXY) {
        return jsonResponse(404, errorBody(404, "not_found", `unknown proxy ${match[1]}`));
      }
      return jsonResponse(200, graphFixture);
    }
    match = path.match(/^\/api\/v1\/contracts\/(0x[0-9a-f]{40})\/source$/);
    if (match) {
      if (server.sourceDown) {
        return jsonResponse(502, errorBody(502, "upstream_unavailable", "explorer unreachable"));
      }
      const bundle = sources[match[1]];
      if (bundle) return jsonResponse(200, bundle);
      return jsonResponse(200, {
        address: match[1],
        verified: false,
        source_text: "",
        compiler_version: "",
        contract_name: "",
        fetched_at: 1_700_010_000,
        origin: "fixture",
      } satisfies SourceBundle);
    }
    return jsonResponse(404, errorBody(404, "not_found", `no route ${path}`));
  };
  return server;
}
