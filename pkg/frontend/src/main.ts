import { ApiClient } from "./api.js";
import { GalleryApp } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app element");
}
void new GalleryApp(root, new ApiClient()).start();
