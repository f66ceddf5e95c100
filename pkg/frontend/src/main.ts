/** Browser entry point: wires the API client, controller, and UI together.
 * Query parameters: ?base=<service url> ?category=<id> ?seed=<n>. */

import { TrendcastApi } from "./api.js";
import { ChatController } from "./state.js";
import { mountChat } from "./ui.js";

function userId(): string {
  const key = "trendcast-user-id";
  let id = window.localStorage.getItem(key);
  if (id === null) {
    id = `web-${Math.random().toString(36).slice(2, 10)}`;
    window.localStorage.setItem(key, id);
  }
  return id;
}

function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("base") ?? "http://127.0.0.1:8080";
  const category = params.get("category") ?? undefined;
  const rawSeed = params.get("seed");
  const seed = rawSeed === null ? undefined : Number(rawSeed);

  const root = document.getElementById("app");
  if (root === null) {
    throw new Error("missing #app container");
  }

  const api = new TrendcastApi(base, userId());
  const controller = new ChatController(api);
  mountChat(root, controller);
  void controller.start(category, seed);
  void controller.refreshWishlist();
}

boot();
