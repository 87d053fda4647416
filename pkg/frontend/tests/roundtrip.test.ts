// Full round trip against the analysis toolkit's CLI: pack an evaluation,
// answer every item through the session core, export the CSV, score it,
// and check the agreement against the scripted ground truth exactly.

import { execFileSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import {
  SessionState,
  exportResponses,
  goTo,
  itemView,
  loadPackage,
  recordSelection,
} from '../src/session.js';
import { renderItemView } from '../src/render.js';
import { MemoryProgressStore } from '../src/storage.js';
import { EvalPackage } from '../src/types.js';

const ITEM_COUNT = 24;

let workdir: string;
let packageText: string;
let pkg: EvalPackage;

function cli(args: string[]): void {
  execFileSync('texturebias', args, { stdio: 'pipe' });
}

beforeAll(() => {
  workdir = fs.mkdtempSync(path.join(os.tmpdir(), 'annotator-roundtrip-'));
  const world = path.join(workdir, 'world');
  const tavout = path.join(workdir, 'tavout');
  const analysis = path.join(workdir, 'analysis');
  const evalout = path.join(workdir, 'evalout');

  cli(['synth', '--out', world, '--textures', '6', '--objects', '6',
       '--noise', '0.1', '--samples-per-texture', '60',
       '--images-per-object', '12', '--seed', '11']);
  cli(['tav', '--registry', path.join(world, 'registry.json'),
       '--texture-records', path.join(world, 'texture_records.jsonl'),
       '--out', tavout]);
  cli(['analyze', '--registry', path.join(world, 'registry.json'),
       '--tav', path.join(tavout, 'tav.csv'),
       '--val-records', path.join(world, 'image_records.jsonl'),
       '--out', analysis]);
  cli(['humaneval', 'pack',
       '--registry', path.join(world, 'registry.json'),
       '--assignments', path.join(analysis, 'assignments.csv'),
       '--count', String(ITEM_COUNT), '--seed', '3', '--out', evalout]);

  packageText = fs.readFileSync(path.join(evalout, 'package.json'), 'utf-8');
  pkg = JSON.parse(packageText) as EvalPackage;
});

afterAll(() => {
  fs.rmSync(workdir, { recursive: true, force: true });
});

// Items at positions divisible by 3 get a deliberately wrong multi-select;
// the rest select exactly the hidden answer option.
function agreeingPlan(k: number): boolean {
  return k % 3 !== 0;
}

function scriptSession(): SessionState {
  const store = new MemoryProgressStore();
  let state = loadPackage(packageText, store);
  for (let k = 0; k < ITEM_COUNT; k++) {
    const tid = pkg.items[k].tid_option_index;
    const pick = agreeingPlan(k)
      ? [tid]
      : [(tid + 1) % 4, (tid + 2) % 4];
    state = recordSelection(state, pick, store);
  }
  return state;
}

describe('scripted session round trip', () => {
  it('exports a CSV the scorer parses with zero errors and exact agreement', () => {
    const state = scriptSession();
    const csv = exportResponses(state);
    const responsesPath = path.join(workdir, 'responses.csv');
    fs.writeFileSync(responsesPath, csv);

    const lines = csv.trimEnd().split('\n');
    expect(lines).toHaveLength(ITEM_COUNT + 1);
    expect(lines[0]).toBe('package_id,record_id,selected_indices');

    const scoreout = path.join(workdir, 'scoreout');
    cli(['humaneval', 'score',
         '--package', path.join(workdir, 'evalout', 'package.json'),
         '--responses', responsesPath, '--out', scoreout]);

    const agreement = fs
      .readFileSync(path.join(scoreout, 'agreement.csv'), 'utf-8')
      .trimEnd()
      .split('\n')
      .map((line) => line.split(','));
    expect(agreement[0]).toEqual([
      'scope', 'texture_id', 'texture_name', 'answered', 'agreeing', 'rate',
    ]);

    const expectedAgreeing = [...Array(ITEM_COUNT).keys()].filter(
      agreeingPlan,
    ).length;
    const overall = agreement[1];
    expect(overall[0]).toBe('overall');
    expect(Number(overall[3])).toBe(ITEM_COUNT);
    expect(Number(overall[4])).toBe(expectedAgreeing);
    expect(Number.parseFloat(overall[5])).toBe(expectedAgreeing / ITEM_COUNT);

    // Per-texture rows must add up to the scripted ground truth as well.
    const byTexture = new Map<number, { answered: number; agreeing: number }>();
    pkg.items.forEach((item, k) => {
      const textureId = item.options[item.tid_option_index];
      const bucket = byTexture.get(textureId) ?? { answered: 0, agreeing: 0 };
      bucket.answered += 1;
      if (agreeingPlan(k)) {
        bucket.agreeing += 1;
      }
      byTexture.set(textureId, bucket);
    });
    for (const row of agreement.slice(2)) {
      expect(row[0]).toBe('texture');
      const expected = byTexture.get(Number(row[1]));
      expect(expected).toBeDefined();
      expect(Number(row[3])).toBe(expected!.answered);
      expect(Number(row[4])).toBe(expected!.agreeing);
    }
  });

  it('omits unanswered items from a partial export and still scores', () => {
    const store = new MemoryProgressStore();
    let state = loadPackage(packageText, store);
    for (let k = 0; k < 5; k++) {
      state = recordSelection(state, [pkg.items[k].tid_option_index], store);
    }
    const csv = exportResponses(state);
    expect(csv.trimEnd().split('\n')).toHaveLength(6);

    const partialPath = path.join(workdir, 'partial.csv');
    fs.writeFileSync(partialPath, csv);
    const scoreout = path.join(workdir, 'scoreout-partial');
    cli(['humaneval', 'score',
         '--package', path.join(workdir, 'evalout', 'package.json'),
         '--responses', partialPath, '--out', scoreout]);
    const overall = fs
      .readFileSync(path.join(scoreout, 'agreement.csv'), 'utf-8')
      .split('\n')[1]
      .split(',');
    expect(Number(overall[3])).toBe(5);
    expect(Number(overall[4])).toBe(5);
  });

  it('never reveals the hidden answer on the page or in the export', () => {
    let state = scriptSession();
    for (let k = 0; k < ITEM_COUNT; k++) {
      state = goTo(state, k);
      const view = itemView(state);
      expect(view).not.toBeNull();
      expect(Object.keys(view!)).not.toContain('tid_option_index');
      expect(JSON.stringify(view)).not.toContain('tid');
      expect(renderItemView(view!)).not.toContain('tid');
    }
    expect(exportResponses(state)).not.toContain('tid');
  });
});
