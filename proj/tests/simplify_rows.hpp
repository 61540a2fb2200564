#pragma once

#include <array>
#include <string_view>

// The 33 simplification rows, instantiated with distinct atoms a, b, c.
struct SimplifyRow {
  std::string_view before;
  std::string_view after;
};

inline constexpr std::array<SimplifyRow, 33> kSimplifyRows{{
    {"((a?)?)", "(a?)"},
    {"((a+)?)", "(a*)"},
    {"((a*)?)", "(a*)"},
    {"((a+)+)", "(a+)"},
    {"((a?)+)", "(a*)"},
    {"((a*)+)", "(a*)"},
    {"((a?)*)", "(a*)"},
    {"((a+)*)", "(a*)"},
    {"((a*)*)", "(a*)"},
    {"((a b) c)", "(a b c)"},
    {"(a (b c))", "(a b c)"},
    {"((a|b)|c)", "(a|b|c)"},
    {"(a|(b|c))", "(a|b|c)"},
    {"((a&b)&c)", "(a&b&c)"},
    {"(a&(b&c))", "(a&b&c)"},
    {"((a?)|b)", "((a|b)?)"},
    {"(a|(b?))", "((a|b)?)"},
    {"(((a+)|b)+)", "((a|b)+)"},
    {"((a|(b+))+)", "((a|b)+)"},
    {"(((a*)|b)+)", "((a|b)*)"},
    {"((a|(b*))+)", "((a|b)*)"},
    {"(((a+)|b)*)", "((a|b)*)"},
    {"((a|(b+))*)", "((a|b)*)"},
    {"(((a*)|b)*)", "((a|b)*)"},
    {"((a|(b*))*)", "((a|b)*)"},
    {"(((a?) (b?))+)", "((a|b)*)"},
    {"(((a*) (b*))+)", "((a|b)*)"},
    {"(((a?) (b?))*)", "((a|b)*)"},
    {"(((a*) (b*))*)", "((a|b)*)"},
    {"(((a+) (b?))+)", "((a (b?))+)"},
    {"(((a?) (b+))+)", "(((a?) b)+)"},
    {"(((a+) (b?))*)", "((a (b?))*)"},
    {"(((a?) (b+))*)", "(((a?) b)*)"},
}};
