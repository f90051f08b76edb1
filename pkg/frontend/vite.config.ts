import { defineConfig } from "vitest/config";

// The dev server proxies /api to a running `shape3d serve` instance;
// point SHAPE3D_API elsewhere to target a different host/port.
export default defineConfig({
  server: {
    proxy: {
      "/api": process.env.SHAPE3D_API ?? "http://127.0.0.1:8371",
    },
  },
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
  },
});
