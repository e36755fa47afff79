/**
 * Drive input: held keys map to a throttle/steer pair sampled at 20 Hz.
 *
 * W/S set throttle +-60 (Shift boosts to 100), A/D set steer -+30
 * (A is negative steer). Releasing everything emits a single stop
 * command, after which the sampler goes quiet until new input arrives.
 */

export interface DriveInput {
  throttle: number;
  steer: number;
}

export const SAMPLE_HZ = 20;
const CRUISE = 60;
const BOOST = 100;
const STEER = 30;

export class KeyTracker {
  private held = new Set<string>();
  shift = false;

  keyDown(code: string): void {
    this.held.add(code);
    if (code === "ShiftLeft" || code === "ShiftRight") this.shift = true;
  }

  keyUp(code: string): void {
    this.held.delete(code);
    if (code === "ShiftLeft" || code === "ShiftRight") this.shift = false;
  }

  clear(): void {
    this.held.clear();
    this.shift = false;
  }

  current(): DriveInput {
    const magnitude = this.shift ? BOOST : CRUISE;
    let throttle = 0;
    let steer = 0;
    if (this.held.has("KeyW")) throttle += magnitude;
    if (this.held.has("KeyS")) throttle -= magnitude;
    if (this.held.has("KeyA")) steer -= STEER;
    if (this.held.has("KeyD")) steer += STEER;
    return { throttle, steer };
  }
}

/**
 * Stateful sampler: call once per 20 Hz tick with the current input;
 * returns the command to send, or null while idle at rest.
 */
export class DriveSampler {
  private wasDriving = false;

  sample(input: DriveInput): DriveInput | null {
    const driving = input.throttle !== 0 || input.steer !== 0;
    if (driving) {
      this.wasDriving = true;
      return input;
    }
    if (this.wasDriving) {
      this.wasDriving = false;
      return { throttle: 0, steer: 0 };
    }
    return null;
  }
}
