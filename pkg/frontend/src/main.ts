/** Browser entry point. The only configuration is the API base URL, read
 * from the <meta name="api-base"> tag (same-origin by default). */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const meta = document.querySelector<HTMLMetaElement>('meta[name="api-base"]');
const api = new ApiClient(meta?.content ?? "");
const root = document.getElementById("app");
if (root) {
  void new App(root, api, window).init();
}
