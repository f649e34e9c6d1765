from shlrkit.dsl.build import ModelObjects, build_model
from shlrkit.dsl.parser import ModelParser, parse_expression, parse_model
from shlrkit.dsl.printer import format_expression, print_model
