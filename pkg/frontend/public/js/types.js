// API payload types. The service wraps every response in a
// schema-versioned envelope; `data` shapes below mirror the JSON
// emitted by the backend verbatim — the console never derives numbers
// of its own.
export {};
