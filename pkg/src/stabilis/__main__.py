from stabilis.cli import main

main()
