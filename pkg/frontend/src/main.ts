import { App } from "./app";
import "./styles.css";

const root = document.getElementById("app");
if (root) {
  App.mount(root).catch((err) => {
    root.textContent = `Failed to load schema: ${err instanceof Error ? err.message : err}`;
  });
}
