/** Payload types mirroring the JSON Schemas published by the backend API. */

export type ProxyType =
  | "Eip1967"
  | "UupsLike"
  | "BeaconLike"
  | "MinimalEip1167"
  | "DelegatecallGeneric"
  | "NotProxy";

export type ChangeCategory =
  | "VulnerabilityFix"
  | "FeatureModification"
  | "GasOptimization"
  | "Other";

export interface ProxyNode {
  address: string;
  proxy_type: ProxyType;
  created_at: number;
  total_versions: number;
  evidence?: string[];
}

export interface VersionNode {
  proxy: string;
  version_number: number;
  contract_address: string;
  creation_timestamp?: number | null;
  last_tx_timestamp?: number | null;
  total_transactions: number;
  vulnerabilities: string[];
}

export interface ChangeEdge {
  proxy: string;
  from_version: number;
  to_version: number;
  categories: ChangeCategory[];
  evidence: string[];
}

export interface ProxiesPage {
  items: ProxyNode[];
  total: number;
  limit: number;
  offset: number;
}

export interface LineageItem {
  version: VersionNode;
  change?: ChangeEdge | null;
}

export interface Lineage {
  proxy: ProxyNode;
  versions: LineageItem[];
}

export interface GraphNode {
  id: string;
  type: "proxy" | "version";
  label: string;
  attributes?: Record<string, unknown>;
}

export interface GraphEdge {
  source: string;
  target: string;
  kind: "implements" | "observed_change";
  categories?: string[];
  evidence?: string[];
}

export interface Subgraph {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface SourceBundle {
  address: string;
  verified: boolean;
  source_text: string;
  compiler_version: string;
  contract_name: string;
  fetched_at: number;
  origin: "live" | "cache" | "fixture";
}

export interface Stats {
  proxy_count: number;
  version_count: number;
  edge_counts: { implements: number; observed_change: number };
  by_type: Record<string, number>;
}

export interface ApiErrorBody {
  status: number;
  code: "not_found" | "bad_request" | "upstream_unavailable";
  message: string;
}
