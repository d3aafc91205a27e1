import { describe, expect, it } from 'vitest';

import {
  DEFAULT_FORM,
  FORM_FIELD_MAP,
  buildSubmission,
  validateForm,
  type AnalysisFormModel,
} from '../src/form.js';

const FILLED: AnalysisFormModel = {
  startDate: '2022-04-14',
  startTime: '08:30:00',
  intervalS: 60,
  collisionDistanceM: 1.5,
  collisionIntervalS: 300,
  collisionUser: 'U00',
};

describe('form field mapping', () => {
  it('maps the six settings one-to-one onto request fields', () => {
    const sources = Object.keys(FORM_FIELD_MAP);
    const targets = Object.values(FORM_FIELD_MAP);
    expect(sources.sort()).toEqual(
      ['collisionDistanceM', 'collisionIntervalS', 'collisionUser', 'intervalS', 'startDate', 'startTime'].sort(),
    );
    expect(new Set(targets).size).toBe(6); // injective
    expect(targets.sort()).toEqual(
      ['collision_distance_m', 'collision_interval_s', 'index_user', 'start_date', 'start_time', 'step_s'].sort(),
    );
  });

  it('submission carries every setting exactly once across body and trace query', () => {
    const plan = buildSubmission(FILLED);
    expect(plan.analysisBody).toEqual({
      start_date: '2022-04-14',
      start_time: '08:30:00',
      step_s: 60,
      collision_distance_m: 1.5,
      collision_interval_s: 300,
      index_user: null,
    });
    expect(plan.traceQuery).toEqual({ index_user: 'U00' });
    // the six form values land on the six distinct mapped fields
    const landed = { ...plan.analysisBody, index_user: plan.traceQuery?.index_user };
    for (const [field, target] of Object.entries(FORM_FIELD_MAP)) {
      expect(landed).toHaveProperty(target);
      void field;
    }
  });

  it('normalizes HH:MM to HH:MM:SS', () => {
    const plan = buildSubmission({ ...FILLED, startTime: '08:30' });
    expect(plan.analysisBody.start_time).toBe('08:30:00');
  });

  it('collision user empty means no trace query', () => {
    expect(buildSubmission({ ...FILLED, collisionUser: '' }).traceQuery).toBeNull();
  });
});

describe('client-side validation mirrors the server rules', () => {
  it('accepts the defaults', () => {
    expect(validateForm({ ...DEFAULT_FORM })).toEqual([]);
  });

  it('rejects collision interval below the interval', () => {
    const errors = validateForm({ ...FILLED, intervalS: 120, collisionIntervalS: 60 });
    expect(errors.map((e) => e.field)).toContain('collisionIntervalS');
  });

  it('rejects non-positive distance and interval', () => {
    expect(validateForm({ ...FILLED, collisionDistanceM: 0 }).map((e) => e.field)).toContain('collisionDistanceM');
    expect(validateForm({ ...FILLED, intervalS: 0 }).map((e) => e.field)).toContain('intervalS');
  });

  it('rejects malformed date and time', () => {
    expect(validateForm({ ...FILLED, startDate: '14/04/2022' }).map((e) => e.field)).toContain('startDate');
    expect(validateForm({ ...FILLED, startTime: '8am' }).map((e) => e.field)).toContain('startTime');
  });

  it('buildSubmission throws on invalid input', () => {
    expect(() => buildSubmission({ ...FILLED, collisionDistanceM: -1 })).toThrow(/distance/);
  });
});
