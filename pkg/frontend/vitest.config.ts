import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the end-to-end suites spawn the session service and a headless replay
    testTimeout: 60_000,
    hookTimeout: 60_000,
    pool: "forks",
  },
});
