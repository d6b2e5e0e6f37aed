import { App } from "./app";

const container = document.getElementById("app");
if (!container) throw new Error("missing #app container");
void new App(container).start();
