# Subcommands of the braidform CLI
