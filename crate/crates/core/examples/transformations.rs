//! The eight presentations of one game, and how each player sees it.
//!
//! ```bash
//! cargo run -p instlab --example transformations
//! ```

use instlab::game::{compose, viewer_presentation, Axis};
use instlab::{BimatrixGame, Role, Transformation};

fn main() {
    let game = BimatrixGame::from_tuples("bos", [[(0, 0), (0, 0)], [(1, 0), (8, 7)]]);
    println!("canonical  {game}\n");
    for t in Transformation::ALL {
        let shown = t.apply(&game);
        let axis = |r| match viewer_presentation(&game, r, t).chooses {
            Axis::Rows => "rows",
            Axis::Columns => "cols",
        };
        println!("{t:<18} {shown}  P1 picks {}, P2 picks {}", axis(Role::Player1), axis(Role::Player2));
        assert_eq!(t.inverse().apply(&shown), game);
    }
    let (a, b) = (Transformation::Transpose, Transformation::SwapRows);
    println!("\nSwapRows, then Transpose = {}", compose(a, b));
}
