import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    // the roundtrip suite talks to a live service process
    testTimeout: 15_000,
    hookTimeout: 60_000,
  },
});
