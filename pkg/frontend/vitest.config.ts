import { defineConfig } from 'vitest/config';

const exclude = ['node_modules/**'];
if (!process.env.LIVE_API) {
  // the live suite needs the Python service on this machine
  exclude.push('tests/live_api.test.ts');
}

export default defineConfig({
  test: {
    environment: 'happy-dom',
    include: ['tests/**/*.test.ts'],
    exclude,
    testTimeout: 30000,
    hookTimeout: 120000,
  },
});
