import { ApiClient } from "./api.js";
import { SessionFlow } from "./app.js";

const API_BASE = new URLSearchParams(location.search).get("api") ?? "";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

void new SessionFlow(root, new ApiClient(API_BASE)).boot();
