/** ViewState and its URL-fragment serialization.
 *
 * The whole view is reconstructible from the fragment, so any rendered
 * state is deep-linkable: refresh or share the URL and the app reloads
 * the identical view from the backend.
 */

export interface ViewFilter {
  proxy_type: string;
  min_versions: number | null;
  q: string;
}

export interface PaneLayout {
  graph: boolean;
  table: boolean;
  source: boolean;
}

export interface ViewState {
  selected_address: string | null;
  active_node: string | null;
  filter: ViewFilter;
  pane_layout: PaneLayout;
}

export function defaultViewState(): ViewState {
  return {
    selected_address: null,
    active_node: null,
    filter: { proxy_type: "", min_versions: null, q: "" },
    pane_layout: { graph: true, table: true, source: false },
  };
}

function paneFlags(layout: PaneLayout): string {
  return (layout.graph ? "g" : "") + (layout.table ? "t" : "") + (layout.source ? "s" : "");
}

export function encodeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.selected_address) params.set("a", state.selected_address);
  if (state.active_node) params.set("n", state.active_node);
  if (state.filter.proxy_type) params.set("type", state.filter.proxy_type);
  if (state.filter.min_versions !== null) {
    params.set("minv", String(state.filter.min_versions));
  }
  if (state.filter.q) params.set("q", state.filter.q);
  const panes = paneFlags(state.pane_layout);
  if (panes !== paneFlags(defaultViewState().pane_layout)) params.set("panes", panes);
  return params.toString();
}

export function decodeViewState(fragment: string): ViewState {
  const state = defaultViewState();
  const params = new URLSearchParams(fragment.replace(/^#/, ""));
  state.selected_address = params.get("a");
  state.active_node = params.get("n");
  state.filter.proxy_type = params.get("type") ?? "";
  const minv = params.get("minv");
  state.filter.min_versions = minv !== null && /^\d+$/.test(minv) ? Number(minv) : null;
  state.filter.q = params.get("q") ?? "";
  const panes = params.get("panes");
  if (panes !== null) {
    state.pane_layout = {
      graph: panes.includes("g"),
      table: panes.includes("t"),
      source: panes.includes("s"),
    };
  }
  return state;
}
