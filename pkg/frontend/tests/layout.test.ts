import { describe, expect, it } from "vitest";

import { forceLayout, isPureChain, layoutGraph, linearLayout } from "../src/layout.js";
import type { Subgraph } from "../src/types.js";
import { graphFixture, PROXY } from "./fixture.js";

function branchingGraph(): Subgraph {
  // Two change edges leaving version 1: not a pure chain.
  return {
    nodes: graphFixture.nodes,
    edges: [
      ...graphFixture.edges.filter((e) => e.kind === "implements"),
      { source: `version:${PROXY}:1`, target: `version:${PROXY}:2`, kind: "observed_change" },
      { source: `version:${PROXY}:1`, target: `version:${PROXY}:3`, kind: "observed_change" },
    ],
  };
}

describe("layout", () => {
  it("classifies the [A,B,A] fixture as a pure chain", () => {
    expect(isPureChain(graphFixture)).toBe(true);
  });

  it("classifies a branching history as not a pure chain", () => {
    expect(isPureChain(branchingGraph())).toBe(false);
  });

  it("linear layout orders versions left to right by version number", () => {
    const layout = linearLayout(graphFixture, 800, 400);
    const xs = [1, 2, 3].map((n) => layout.get(`version:${PROXY}:${n}`)!.x);
    expect(xs[0]).toBeLessThan(xs[1]);
    expect(xs[1]).toBeLessThan(xs[2]);
    const proxy = layout.get(`proxy:${PROXY}`)!;
    expect(proxy.y).toBeLessThan(layout.get(`version:${PROXY}:1`)!.y);
  });

  it("layoutGraph picks the linear layout for chains and force otherwise", () => {
    expect(layoutGraph(graphFixture, 800, 400)).toEqual(linearLayout(graphFixture, 800, 400));
    const branched = branchingGraph();
    expect(layoutGraph(branched, 800, 400)).toEqual(forceLayout(branched, 800, 400));
  });

  it("force layout is deterministic and keeps nodes in bounds", () => {
    const branched = branchingGraph();
    const a = forceLayout(branched, 800, 400);
    const b = forceLayout(branched, 800, 400);
    expect(a).toEqual(b);
    for (const point of a.values()) {
      expect(point.x).toBeGreaterThanOrEqual(0);
      expect(point.x).toBeLessThanOrEqual(800);
      expect(point.y).toBeGreaterThanOrEqual(0);
      expect(point.y).toBeLessThanOrEqual(400);
    }
  });

  it("force layout separates distinct nodes", () => {
    const layout = forceLayout(branchingGraph(), 800, 400);
    const points = [...layout.values()];
    for (let i = 0; i < points.length; i++) {
      for (let j = i + 1; j < points.length; j++) {
        const dist = Math.hypot(points[i].x - points[j].x, points[i].y - points[j].y);
        expect(dist).toBeGreaterThan(1);
      }
    }
  });
});
