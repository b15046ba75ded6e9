import { ApiClient } from "./api.js";
import { createApp } from "./ui.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
// same origin as cmd_serve, which hosts these assets under /ui
createApp(root, new ApiClient(""));
