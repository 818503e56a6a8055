//! Tweet normalization with the shipped emoji table, step by step and
//! composed.
//!
//! ```text
//! cargo run --example preprocess_tweets
//! ```

use advtext::emoji_data::shipped_table;
use advtext::preprocess::{
    demojize, normalize_whitespace, preprocess_text, replace_url_token, unescape_html,
};

fn main() {
    let table = shipped_table();
    println!("emoji table: {} entries", table.len());

    let raw = [
        "Stay &amp; safe 😷  HTTPURL",
        "@USER 12 new cases in\tLagos\n\nHTTPURL",
        "&lt;3 to the nurses 🙏🙏",
        "lockdown again?? 😂😂 HTTPURLs are not urls",
        "US 🇺🇸 deaths pass 100,000 &#8212; report",
    ];
    for text in raw {
        println!("raw         {text:?}");
        println!("  unescape  {:?}", unescape_html(text));
        println!("  url       {:?}", replace_url_token(text));
        println!("  demojize  {:?}", demojize(text, &table));
        println!("  spaces    {:?}", normalize_whitespace(text));
        let clean = preprocess_text(text, &table);
        println!("  composed  {clean:?}");
        assert_eq!(preprocess_text(&clean, &table), clean);
    }
}
