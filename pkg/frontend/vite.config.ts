import { defineConfig } from "vitest/config";

// In dev the UI is served by vite and /api is proxied to a running
// annotation service, so the browser stays same-origin. Point
// MESHMARK_API elsewhere to target another instance.
export default defineConfig({
  server: {
    proxy: {
      "/api": {
        target: process.env.MESHMARK_API ?? "http://127.0.0.1:8750",
        changeOrigin: true,
      },
    },
  },
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
