// Boot: fetch the spec from the hosting server (or ?api=<url>) and render.

import { fetchInterface } from "./api.js";
import { render } from "./render.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const baseUrl = new URLSearchParams(window.location.search).get("api") ?? "";
  try {
    const spec = await fetchInterface(baseUrl);
    render(spec, root, baseUrl);
  } catch (error) {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = String(error);
    root.textContent = "";
    root.appendChild(banner);
  }
}

void boot();
