pub fn cli_main<I: IntoIterator<Item = String>>(_argv: I) -> i32 { 0 }
