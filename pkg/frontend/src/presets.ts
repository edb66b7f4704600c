/**
 * Demo instances shipped with the console, as verbatim service documents.
 * (The empty-core market from the library is not a rent-division instance
 * and has no grid representation, so the fourth preset is the tempting
 * second apartment committed onto the trio.)
 */

import type { EditOp, InstanceDoc } from "./types.js";

export const MIRRORED_PAIR: InstanceDoc = {
  players: ["player1", "player2"],
  apartments: [
    { name: "apt1", rent: "300", rooms: ["apt1-room1", "apt1-room2"] },
    { name: "apt2", rent: "300", rooms: ["apt2-room1", "apt2-room2"] },
  ],
  values: [
    [
      ["200", "200"],
      ["100", "100"],
    ],
    [
      ["100", "100"],
      ["200", "200"],
    ],
  ],
  normalized: true,
};

export const DOMINANT_PAIR: InstanceDoc = {
  players: ["player1", "player2"],
  apartments: [
    { name: "apt1", rent: "100", rooms: ["apt1-room1", "apt1-room2"] },
    { name: "apt2", rent: "100", rooms: ["apt2-room1", "apt2-room2"] },
  ],
  values: [
    [
      ["100", "100"],
      ["0", "0"],
    ],
    [
      ["1", "1"],
      ["99", "99"],
    ],
  ],
  normalized: true,
};

export const TRIO_BASE: InstanceDoc = {
  players: ["player1", "player2", "player3"],
  apartments: [{ name: "apt1", rent: "300", rooms: ["apt1-room1", "apt1-room2", "apt1-room3"] }],
  values: [
    [["150", "150", "0"]],
    [["0", "150", "150"]],
    [["75", "75", "150"]],
  ],
  normalized: false,
};

/** The apartment that drags the trio's best maximin value below 50. */
export const TEMPTING_APARTMENT_EDIT: EditOp = {
  op: "add_apartment",
  name: "apt2",
  rent: "300",
  rooms: ["apt2-room1", "apt2-room2", "apt2-room3"],
  values: [
    ["100", "100", "100"],
    ["300", "0", "0"],
    ["300", "0", "0"],
  ],
};

export const TRIO_WITH_TEMPTATION: InstanceDoc = {
  players: ["player1", "player2", "player3"],
  apartments: [
    { name: "apt1", rent: "300", rooms: ["apt1-room1", "apt1-room2", "apt1-room3"] },
    { name: "apt2", rent: "300", rooms: ["apt2-room1", "apt2-room2", "apt2-room3"] },
  ],
  values: [
    [
      ["150", "150", "0"],
      ["100", "100", "100"],
    ],
    [
      ["0", "150", "150"],
      ["300", "0", "0"],
    ],
    [
      ["75", "75", "150"],
      ["300", "0", "0"],
    ],
  ],
  normalized: false,
};

export const PRESETS: ReadonlyArray<{ key: string; label: string; instance: InstanceDoc }> = [
  { key: "mirrored-pair", label: "Mirrored pair (no universal solution)", instance: MIRRORED_PAIR },
  { key: "dominant-pair", label: "Dominant pair (negotiation showcase)", instance: DOMINANT_PAIR },
  { key: "trio", label: "Trio, one apartment", instance: TRIO_BASE },
  { key: "trio-temptation", label: "Trio with tempting second flat", instance: TRIO_WITH_TEMPTATION },
];
