//! Prompt construction. Every configuration receives the same fixed prompt
//! text for its input mode and variant; prompt wording is part of the
//! versioned configuration surface, so changes here are changes to the
//! benchmark.

use mazeval_core::report::{InputMode, PromptVariant};

/// Tool prohibition embedded in every prompt.
pub const NO_TOOLS_SENTENCE: &str =
    "Do not use any external tools, code, search, calculators, or graph-search programs.";

/// Extra clauses for the visual-intuition variant.
pub const VISUAL_INTUITION_CLAUSES: &str = "Do NOT convert the maze into a text grid, matrix, \
or row/column representation. Do NOT perform step-by-step BFS, DFS, or any graph-search \
algorithm in text. Instead, solve this the way a human would: look at the image, visually \
trace the walkable path.";

/// The answer schema, documented to the solver exactly as graded.
pub const RESPONSE_SCHEMA: &str = r#"{
  "grid_size": [rows, cols],
  "start_found": true,
  "goal_found": true,
  "reachable": true,
  "path_length": 12,
  "path": ["R", "R", "D", "D", "R", "U", "R", "R", "D", "D", "D", "R"]
}"#;

/// Build the full user prompt for one maze. In text mode the exact exported
/// grid is embedded; in image mode the image travels separately as request
/// payload.
pub fn build_prompt(input_mode: InputMode, variant: PromptVariant, text_grid: Option<&str>) -> String {
    let mut prompt = String::new();
    match input_mode {
        InputMode::Image => {
            prompt.push_str(
                "You are given a pixel-art maze image. The player sprite marks the start \
                 and the treasure chest marks the goal. Brick tiles are walls. Spiked \
                 hazard tiles are traps; traps are impassable, exactly like walls. All \
                 other tiles are open floor.\n\n",
            );
        }
        InputMode::TextGrid => {
            prompt.push_str(
                "You are given a maze as a text grid, one row per line. Symbols: S = start, \
                 G = goal, . = open floor, # = wall, T = trap. Walls and traps are \
                 impassable.\n\nMaze:\n",
            );
            prompt.push_str(text_grid.unwrap_or(""));
            prompt.push_str("\n\n");
        }
    }
    prompt.push_str(
        "Find the shortest path from the start to the goal. Moves are \"U\" (up), \"D\" \
         (down), \"L\" (left), \"R\" (right); diagonal moves are not allowed.\n\n",
    );
    if variant == PromptVariant::VisualIntuition {
        prompt.push_str(VISUAL_INTUITION_CLAUSES);
        prompt.push_str("\n\n");
    }
    prompt.push_str(
        "Respond with a single JSON object and nothing else - no prose, no code fences. \
         Use exactly these keys:\n",
    );
    prompt.push_str(RESPONSE_SCHEMA);
    prompt.push_str(
        "\n\nIf no path exists, set \"reachable\" to false, \"path_length\" to null, and \
         \"path\" to []. ",
    );
    prompt.push_str(NO_TOOLS_SENTENCE);
    prompt
}
