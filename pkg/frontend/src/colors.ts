/** Stable color tokens for the four change categories and the node kinds.
 * These are fixed so legends and deep-linked screenshots stay comparable. */

import type { ChangeCategory } from "./types.js";

export const CATEGORY_COLORS: Record<ChangeCategory, string> = {
  VulnerabilityFix: "#d62728",
  FeatureModification: "#1f77b4",
  GasOptimization: "#2ca02c",
  Other: "#7f7f7f",
};

export const NODE_COLORS = {
  proxy: "#9467bd",
  version: "#ff7f0e",
} as const;

export const IMPLEMENTS_EDGE_COLOR = "#c7c7c7";

/** Color for a change edge: the first (highest-priority) category wins. */
export function edgeColor(categories: string[] | undefined): string {
  const first = categories?.[0] as ChangeCategory | undefined;
  return (first && CATEGORY_COLORS[first]) || IMPLEMENTS_EDGE_COLOR;
}
