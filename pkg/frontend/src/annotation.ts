/** Per-turn six-emotion annotation form model (levels 1-5). */

import { EMOTIONS, type Emotion } from './types.js';

export class AnnotationForm {
  private levels = new Map<Emotion, number>();

  setLevel(emotion: Emotion, level: number): void {
    if (!Number.isInteger(level) || level < 1 || level > 5) {
      throw new Error(`level for ${emotion} must be an integer in 1..5`);
    }
    this.levels.set(emotion, level);
  }

  /** One-click neutral baseline: every emotion at level 1. */
  setNeutral(): void {
    for (const emotion of EMOTIONS) {
      this.levels.set(emotion, 1);
    }
  }

  getLevel(emotion: Emotion): number | undefined {
    return this.levels.get(emotion);
  }

  /** Submission is allowed only once all six emotions are rated. */
  isComplete(): boolean {
    return EMOTIONS.every((emotion) => this.levels.has(emotion));
  }

  missing(): Emotion[] {
    return EMOTIONS.filter((emotion) => !this.levels.has(emotion));
  }

  toLabels(): Record<string, number> {
    if (!this.isComplete()) {
      throw new Error(`annotation incomplete: missing ${this.missing().join(', ')}`);
    }
    const labels: Record<string, number> = {};
    for (const emotion of EMOTIONS) {
      labels[emotion] = this.levels.get(emotion)!;
    }
    return labels;
  }

  reset(): void {
    this.levels.clear();
  }
}
