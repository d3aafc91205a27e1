// API payload types. The service wraps every response in a
// schema-versioned envelope; `data` shapes below mirror the JSON
// emitted by the backend verbatim — the console never derives numbers
// of its own.

export interface Envelope<T> {
  schema_version: number;
  data: T;
}

export interface IngestReport {
  user_id: string;
  parsed: number;
  skipped: number;
  dropped_by_accuracy: number;
  stored: number;
  first: string | null;
  last: string | null;
}

export interface DatasetSummary {
  dataset_id: string;
  created_at: string;
  n_users: number;
  users: IngestReport[];
  time_span: [string, string] | null;
}

export type RunStatus = 'pending' | 'running' | 'done' | 'failed';

export interface AnalysisRun {
  run_id: string;
  dataset_id: string;
  status: RunStatus;
  error: string | null;
  created_at: string;
  config: Record<string, unknown>;
  n_events: number | null;
}

export interface ContactEventPayload {
  user_a: string;
  user_b: string;
  t_start: string;
  t_end: string;
  duration_s: number;
  min_distance_m: number;
  mean_distance_m: number;
  mean_accuracy_m: number;
  midpoint: { lat: number; lon: number };
  site_cell: [number, number] | null;
  event_id: string;
}

export interface EventsPage {
  total: number;
  offset: number;
  events: ContactEventPayload[];
}

export interface LevelRecord {
  user_id: string;
  level: number;
  via_user: string;
  first_contact_time: string;
  event_ref: string;
}

export interface LevelsPayload {
  index_user: string;
  level_counts: Record<string, number>;
  records: LevelRecord[];
}

export interface ScoreEntry {
  subject: string;
  kind: 'direct' | 'indirect';
  value: number;
  numerator_sum: number;
  area_m2: number;
  mean_distance_m: number;
}

export interface ScoresPayload {
  index_user: string;
  scores: ScoreEntry[];
}

export interface ReportRow {
  user_id: string;
  date: string;
  time: string;
  latitude: number;
  longitude: number;
  visited_location: string;
  contact_level: number;
}

export interface ReportPayload {
  index_user: string;
  rows: ReportRow[];
}

export interface SimulationState {
  t: number;
  s: number;
  e: number;
  i: number;
  r: number;
}

export interface SimulationRunResult {
  mu: number;
  summary: { peak_i: number; peak_time_days: number; final_r: number };
  states: SimulationState[];
}

export interface SimulationPayload {
  population_n: number;
  runs: SimulationRunResult[];
}

export interface CommonCell {
  cell: [number, number];
  label: string;
  visitors: string[];
  total_visits: number;
  bounds: [number, number, number, number]; // lat_min, lon_min, lat_max, lon_max
}

export interface CommonLocationsPayload {
  cell_m: number;
  min_users: number;
  cells: CommonCell[];
}

// GeoJSON as emitted by /datasets/{id}/geojson

export interface TrackProperties {
  kind: 'track';
  user_id: string;
}

export interface ContactProperties {
  kind: 'contact';
  user_a: string;
  user_b: string;
  t_start: string;
  t_end: string;
  min_distance_m: number;
  level?: number;
}

export interface GeoFeature {
  type: 'Feature';
  geometry:
    | { type: 'LineString'; coordinates: [number, number][] }
    | { type: 'Point'; coordinates: [number, number] };
  properties: TrackProperties | ContactProperties;
}

export interface GeoJsonDoc {
  type: 'FeatureCollection';
  features: GeoFeature[];
}
