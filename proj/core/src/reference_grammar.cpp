// Recursive-descent matcher for explicit statute references:
//
//   ref       = sec_ref | art_ref ;
//   sec_ref   = ("§" | "§§") ws num list_tail? detail* (ws code)? ;
//   art_ref   = ("Art." | "Artikel") ws num detail* (ws code)? ;
//   detail    = ws ("Abs." ws num | "Satz" ws num | "Nr." ws num) ;
//   list_tail = ("," ws num)+ ;
//   num       = digit+ letter? ;
//   code      = upper-case initial token contained in the code whitelist ;
//
// ws is one or more of space, tab, CR, LF or U+00A0.

#include <string>

#include "semtour/extraction.hpp"

namespace semtour {

namespace {

constexpr std::string_view kSection = "\xC2\xA7";  // §
constexpr std::string_view kNbsp = "\xC2\xA0";

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

class Cursor {
public:
    Cursor(std::string_view text, std::size_t pos) : text_(text), pos_(pos) {}

    std::size_t pos() const { return pos_; }
    void reset(std::size_t pos) { pos_ = pos; }
    bool at_end() const { return pos_ >= text_.size(); }

    bool literal(std::string_view lit) {
        if (text_.substr(pos_, lit.size()) != lit) return false;
        pos_ += lit.size();
        return true;
    }

    bool ws() {
        const std::size_t start = pos_;
        while (!at_end()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos_;
            } else if (text_.substr(pos_, kNbsp.size()) == kNbsp) {
                pos_ += kNbsp.size();
            } else {
                break;
            }
        }
        return pos_ > start;
    }

    std::optional<std::string> num() {
        const std::size_t start = pos_;
        while (!at_end() && is_digit(text_[pos_])) ++pos_;
        if (pos_ == start) return std::nullopt;
        if (!at_end() && is_ascii_letter(text_[pos_])) {
            const bool followed_by_word =
                pos_ + 1 < text_.size() && (is_ascii_letter(text_[pos_ + 1]) || is_digit(text_[pos_ + 1]));
            if (!followed_by_word) ++pos_;
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    std::optional<std::string> word() {
        const std::size_t start = pos_;
        if (at_end() || !is_upper(text_[pos_])) return std::nullopt;
        while (!at_end() && is_ascii_letter(text_[pos_])) ++pos_;
        // A code token must end at a word boundary (no digits or non-ASCII letters glued on).
        if (!at_end()) {
            auto c = static_cast<unsigned char>(text_[pos_]);
            if (is_digit(text_[pos_]) || c >= 0xC3) {
                pos_ = start;
                return std::nullopt;
            }
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    char prev() const { return pos_ == 0 ? ' ' : text_[pos_ - 1]; }

private:
    std::string_view text_;
    std::size_t pos_;
};

// ws num; restores the cursor on failure.
std::optional<std::string> spaced_num(Cursor& cur) {
    const std::size_t save = cur.pos();
    if (cur.ws()) {
        if (auto n = cur.num()) return n;
    }
    cur.reset(save);
    return std::nullopt;
}

bool parse_detail(Cursor& cur, Reference& ref) {
    const std::size_t save = cur.pos();
    if (!cur.ws()) return false;
    std::optional<std::string>* slot = nullptr;
    if (cur.literal("Abs.")) {
        slot = &ref.subsection;
    } else if (cur.literal("Satz")) {
        slot = &ref.sentence;
    } else if (cur.literal("Nr.")) {
        slot = &ref.item;
    }
    if (slot) {
        if (auto n = spaced_num(cur)) {
            *slot = std::move(n);
            return true;
        }
    }
    cur.reset(save);
    return false;
}

void parse_list_tail(Cursor& cur, Reference& ref) {
    while (true) {
        const std::size_t save = cur.pos();
        if (!cur.literal(",")) return;
        auto n = spaced_num(cur);
        if (!n) {
            cur.reset(save);
            return;
        }
        ref.further_sections.push_back(std::move(*n));
    }
}

void parse_code(Cursor& cur, Reference& ref, const ExtractorConfig& config) {
    const std::size_t save = cur.pos();
    if (cur.ws()) {
        if (auto w = cur.word(); w && config.code_whitelist.contains(*w)) {
            ref.code = std::move(*w);
            return;
        }
    }
    cur.reset(save);
}

std::optional<Reference> parse_at(std::string_view text, std::size_t pos, const ExtractorConfig& config) {
    Cursor cur(text, pos);
    Reference ref;
    bool section_form = false;
    if (cur.literal(kSection)) {
        cur.literal(kSection);  // "§§"
        section_form = true;
        ref.form = ReferenceForm::section;
    } else {
        if (is_ascii_letter(cur.prev()) && pos > 0) return std::nullopt;
        if (!cur.literal("Artikel") && !cur.literal("Art.")) return std::nullopt;
        ref.form = ReferenceForm::article;
    }
    auto head = spaced_num(cur);
    if (!head) return std::nullopt;
    ref.section = std::move(*head);
    if (section_form) parse_list_tail(cur, ref);
    while (parse_detail(cur, ref)) {
    }
    parse_code(cur, ref, config);
    ref.source_span = {pos, cur.pos()};
    return ref;
}

}  // namespace

std::vector<Reference> parse_references(std::string_view text, const ExtractorConfig& config) {
    std::vector<Reference> refs;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char c = text[pos];
        if (c == kSection[0] || c == 'A') {
            if (auto ref = parse_at(text, pos, config)) {
                pos = ref->source_span.end;
                refs.push_back(std::move(*ref));
                continue;
            }
        }
        ++pos;
    }
    return refs;
}

std::optional<NormAddress> parse_norm_label(std::string_view label) {
    std::size_t start = 0;
    while (start < label.size() && (label[start] == ' ' || label[start] == '\t')) ++start;
    static const ExtractorConfig no_codes;
    auto ref = parse_at(label, start, no_codes);
    if (!ref) return std::nullopt;
    return NormAddress{ref->form, ref->section};
}

}  // namespace semtour
