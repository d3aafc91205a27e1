// The proximity-analysis form: the six analyst settings (start date,
// start time, interval, collision distance, collision interval,
// collision user) map one-to-one onto request-body fields. Validation
// here mirrors the server's config rules so obvious mistakes never
// leave the browser; the server remains authoritative.

export interface AnalysisFormModel {
  startDate: string; // YYYY-MM-DD
  startTime: string; // HH:MM:SS
  intervalS: number; // grid step between evaluated instants
  collisionDistanceM: number;
  collisionIntervalS: number; // minimum sustained contact duration
  collisionUser: string; // index case; empty = all pairs
}

export const DEFAULT_FORM: AnalysisFormModel = {
  startDate: '2022-04-14',
  startTime: '00:00:00',
  intervalS: 60,
  collisionDistanceM: 1.0,
  collisionIntervalS: 300,
  collisionUser: '',
};

/** Form field -> request body field, one-to-one. */
export const FORM_FIELD_MAP: Record<keyof AnalysisFormModel, string> = {
  startDate: 'start_date',
  startTime: 'start_time',
  intervalS: 'step_s',
  collisionDistanceM: 'collision_distance_m',
  collisionIntervalS: 'collision_interval_s',
  collisionUser: 'index_user',
};

export interface FieldError {
  field: keyof AnalysisFormModel;
  message: string;
}

export function validateForm(model: AnalysisFormModel): FieldError[] {
  const errors: FieldError[] = [];
  if (!/^\d{4}-\d{2}-\d{2}$/.test(model.startDate)) {
    errors.push({ field: 'startDate', message: 'use YYYY-MM-DD' });
  }
  if (!/^\d{2}:\d{2}(:\d{2})?$/.test(model.startTime)) {
    errors.push({ field: 'startTime', message: 'use HH:MM or HH:MM:SS' });
  }
  if (!(model.intervalS > 0)) {
    errors.push({ field: 'intervalS', message: 'interval must be positive' });
  }
  if (!(model.collisionDistanceM > 0)) {
    errors.push({ field: 'collisionDistanceM', message: 'collision distance must be positive' });
  }
  if (model.collisionIntervalS < model.intervalS) {
    errors.push({ field: 'collisionIntervalS', message: 'collision interval must be at least the interval' });
  }
  return errors;
}

export interface SubmissionPlan {
  analysisBody: Record<string, unknown>;
  traceQuery: { index_user: string } | null;
}

/**
 * Requests produced by one form submission. Five settings go into the
 * analysis body; the collision user becomes the index_user query of the
 * levels/report/scores calls rather than an event filter in the body,
 * because filtering detection down to one user's pairs would make
 * level-2/3 chains undiscoverable. Together the six form fields map
 * one-to-one onto six request fields.
 */
export function buildSubmission(model: AnalysisFormModel): SubmissionPlan {
  const errors = validateForm(model);
  if (errors.length) {
    throw new Error(errors.map((e) => `${e.field}: ${e.message}`).join('; '));
  }
  const time = model.startTime.length === 5 ? `${model.startTime}:00` : model.startTime;
  return {
    analysisBody: {
      start_date: model.startDate,
      start_time: time,
      step_s: model.intervalS,
      collision_distance_m: model.collisionDistanceM,
      collision_interval_s: model.collisionIntervalS,
      index_user: null,
    },
    traceQuery: model.collisionUser ? { index_user: model.collisionUser } : null,
  };
}
