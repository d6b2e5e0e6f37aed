/// <reference types="vitest/config" />
import { defineConfig } from "vite";

// The dev server proxies API calls to a locally running
// `rigabench serve` (default port 8000, override with RIGABENCH_API);
// the UI itself has no backend of its own.
const target = process.env.RIGABENCH_API ?? "http://127.0.0.1:8000";

export default defineConfig({
  server: {
    proxy: {
      "/sessions": target,
      "/healthz": target,
    },
  },
  test: {
    environment: "happy-dom",
  },
});
