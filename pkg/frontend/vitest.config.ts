import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'happy-dom',
    globalSetup: './tests/global_setup.ts',
    // One live service backs the suite; run files sequentially so status
    // writes in one file cannot interleave with another file's reads.
    fileParallelism: false,
    testTimeout: 20000,
    hookTimeout: 120000,
  },
});
